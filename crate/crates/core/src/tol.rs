//! Numerical tolerances shared by every module.
//!
//! All values assume double precision at desk sizes (complex dimension <= 64).

/// Relative membership tolerance for the skew/symmetric constraints.
pub const MEMBERSHIP: f64 = 1e-10;

/// Relative equality tolerance.
pub const EQ: f64 = 1e-9;

/// Absolute slack on inequalities; a check passes iff `margin >= -INEQ`.
pub const INEQ: f64 = 1e-8;

/// Relative clustering threshold for singular values.
pub const GAP: f64 = 1e-6;

/// Distance from {0, 1/2, 1} tolerated when bucketing Peirce eigenvalues.
pub const PEIRCE_BUCKET: f64 = 1e-7;

/// Relative cutoff below which singular values are treated as zero by the
/// decomposition backends.
pub const ZERO: f64 = 1e-13;

/// Relative cutoff for the support of `range_tripotent`.
pub const RANK: f64 = 1e-9;

/// Relative threshold used when extracting orthonormal bases of spans.
pub const SPAN: f64 = 1e-8;

/// Scale-aware membership tolerance: `MEMBERSHIP * (1 + max_entry)`.
pub fn membership(max_entry: f64) -> f64 {
    MEMBERSHIP * (1.0 + max_entry)
}

/// Scale-aware equality tolerance: `EQ * (1 + scale)`.
pub fn eq(scale: f64) -> f64 {
    EQ * (1.0 + scale)
}
