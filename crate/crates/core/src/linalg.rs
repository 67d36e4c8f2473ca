//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub fn sym_eigen(m: &RMat) -> (Vec<f64>, RMat) {
    let n = m.nrows();
    if n == 0 {
        return (vec![], RMat::zeros(0, 0));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = RMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

fn to_faer(m: &CMat) -> faer::Mat<faer::c64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    })
}

fn from_faer(m: faer::MatRef<'_, faer::c64>) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        C64::new(z.re, z.im)
    })
}

// Complex factorizations go through faer: nalgebra's complex SVD returns
// inaccurate singular vectors when singular values repeat.

/// Eigen-decomposition of a complex Hermitian matrix, eigenvalues ascending.
pub fn herm_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (vec![], CMat::zeros(0, 0));
    }
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = to_faer(&h).self_adjoint_eigen(faer::Side::Lower).expect("hermitian eigensolver converges");
    let vals = (0..n).map(|i| eig.S().column_vector()[i].re).collect();
    (vals, from_faer(eig.U()))
}

/// Singular values of a real matrix, descending.
pub fn singular_values_real(m: &RMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value of a real matrix.
pub fn op_norm_real(m: &RMat) -> f64 {
    singular_values_real(m).first().copied().unwrap_or(0.0)
}

/// Singular values of a complex matrix, descending.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    let s = to_faer(m).singular_values().expect("svd converges");
    let mut s: Vec<f64> = s.into_iter().map(|v| v.max(0.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Complex SVD with singular triples sorted by descending value:
/// `m = sum_i s_i u_i v_i^*` where `u_i` and `v_i` are the returned columns.
pub fn svd_sorted(m: &CMat) -> (Vec<f64>, CMat, CMat) {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return (vec![], CMat::zeros(r, 0), CMat::zeros(c, 0));
    }
    let svd = to_faer(m).thin_svd().expect("svd converges");
    let s = (0..k).map(|i| svd.S().column_vector()[i].re.max(0.0)).collect();
    (s, from_faer(svd.U()), from_faer(svd.V()))
}

/// Orthonormal basis of the null space of a real matrix: right singular
/// vectors whose singular value is below `tol * max(1, s_max)`.
pub fn null_space_real(m: &RMat, tol: f64) -> RMat {
    let (r, c) = m.shape();
    if c == 0 {
        return RMat::zeros(0, 0);
    }
    let mm = if r < c {
        let mut padded = RMat::zeros(c, c);
        padded.view_mut((0, 0), (r, c)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = SVD::new(mm, false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol * smax.max(1.0);
    let cols: Vec<RVec> = (0..c)
        .filter(|&i| svd.singular_values[i] <= cut)
        .map(|i| vt.row(i).transpose())
        .collect();
    if cols.is_empty() {
        RMat::zeros(c, 0)
    } else {
        RMat::from_columns(&cols)
    }
}

/// Modified Gram-Schmidt with one reorthogonalisation pass. Vectors whose
/// residual norm falls below `tol` times their original norm are dropped.
pub fn orthonormalize(vectors: &[CVec], tol: f64) -> Vec<CVec> {
    let mut basis: Vec<CVec> = Vec::new();
    for v in vectors {
        let n0 = v.norm();
        if n0 == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&w);
                w -= b * c;
            }
        }
        let n = w.norm();
        if n > tol * n0 {
            basis.push(w / C64::new(n, 0.0));
        }
    }
    basis
}

/// Extend an orthonormal family inside the span of `pool` until it has
/// `target` members or the pool is exhausted.
pub fn extend_within(basis: &[CVec], pool: &[CVec], target: usize, tol: f64) -> Vec<CVec> {
    let mut all: Vec<CVec> = basis.to_vec();
    for p in pool {
        if all.len() >= target {
            break;
        }
        let n0 = p.norm();
        let mut w = p.clone();
        for _ in 0..2 {
            for b in &all {
                let c = b.dotc(&w);
                w -= b * c;
            }
        }
        let n = w.norm();
        if n0 > 0.0 && n > tol * n0 {
            all.push(w / C64::new(n, 0.0));
        }
    }
    all
}

/// Column vectors of a matrix.
pub fn columns(m: &CMat) -> Vec<CVec> {
    (0..m.ncols()).map(|j| m.column(j).into_owned()).collect()
}

/// Largest entry modulus of a complex matrix.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
