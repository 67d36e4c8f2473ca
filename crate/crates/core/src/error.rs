use thiserror::Error;

/// Errors raised by factor construction, triple calculus and the checkers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid factor descriptor: {0}")]
    InvalidFactor(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
    #[error("membership violation: defect {defect:.3e} exceeds {tolerance:.3e}")]
    MembershipViolation { defect: f64, tolerance: f64 },
    #[error("elements live in different factors")]
    FactorMismatch,
    #[error("not a tripotent (defect {0:.3e})")]
    NotATripotent(f64),
    #[error("tripotent is not minimal")]
    NotMinimal,
    #[error("tripotents are not pairwise orthogonal")]
    NotOrthogonal,
    #[error("unsupported factor for this operation: {0}")]
    UnsupportedFactor(String),
    #[error("rank order violation: rank(f)={inner} must be < rank(e)={outer}")]
    RankOrderViolation { inner: usize, outer: usize },
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("element is zero")]
    ZeroElement,
    #[error("exponent p={0} must be >= 1")]
    BadExponent(f64),
    #[error("element norm {0} is not 1")]
    NotNormOne(f64),
    #[error("singular value {value} within gap tolerance of interval boundary {boundary}")]
    BoundaryCollision { value: f64, boundary: f64 },
    #[error("frames do not span the same Peirce-2 algebra")]
    FrameMismatch,
    #[error("eigenvalue {0} lies inside a forbidden margin")]
    MarginViolation(f64),
    #[error("perturbation {delta} too large (limit {limit})")]
    DeltaTooLarge { delta: f64, limit: f64 },
    #[error("degenerate spectral gap {0:.3e}")]
    DegenerateGap(f64),
    #[error("distance {distance} exceeds admissible delta {delta}")]
    DeltaExceeded { distance: f64, delta: f64 },
    #[error("element norm {0} exceeds 1")]
    OutOfBall(f64),
    #[error("unsatisfiable random model: {0}")]
    UnsatisfiableModel(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("json error: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
