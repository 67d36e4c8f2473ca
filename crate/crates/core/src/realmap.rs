//! Real-linear maps on the realification `[Re c; Im c]` of a factor.
//!
//! Conjugate-linear operators such as `Q(a)` become honest linear maps here,
//! so Peirce projections can be composed, compared and normed uniformly.

use std::ops::{Add, Mul, Sub};

use crate::error::Result;
use crate::factor::{Element, FactorDescriptor};
use crate::linalg::{op_norm_real, sym_eigen, RMat, RVec};

#[derive(Clone, Debug, PartialEq)]
pub struct RealLinearMap {
    factor: FactorDescriptor,
    mat: RMat,
}

impl RealLinearMap {
    /// Tabulate an R-linear map on the real basis `{b_k, i b_k}`.
    pub fn from_fn(factor: FactorDescriptor, f: impl Fn(&Element) -> Element) -> Self {
        let n = 2 * factor.complex_dim();
        let mut mat = RMat::zeros(n, n);
        for k in 0..n {
            let mut e = RVec::zeros(n);
            e[k] = 1.0;
            let out = f(&Element::from_real_coords(factor, &e)).to_real();
            mat.set_column(k, &out);
        }
        RealLinearMap { factor, mat }
    }

    pub fn identity(factor: FactorDescriptor) -> Self {
        let n = 2 * factor.complex_dim();
        RealLinearMap { factor, mat: RMat::identity(n, n) }
    }

    pub fn zero(factor: FactorDescriptor) -> Self {
        let n = 2 * factor.complex_dim();
        RealLinearMap { factor, mat: RMat::zeros(n, n) }
    }

    /// The complex structure: multiplication by `i`.
    pub fn complex_structure(factor: FactorDescriptor) -> Self {
        let d = factor.complex_dim();
        let mut mat = RMat::zeros(2 * d, 2 * d);
        for k in 0..d {
            mat[(k, d + k)] = -1.0;
            mat[(d + k, k)] = 1.0;
        }
        RealLinearMap { factor, mat }
    }

    pub fn factor(&self) -> FactorDescriptor {
        self.factor
    }

    pub fn matrix(&self) -> &RMat {
        &self.mat
    }

    pub fn real_dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn apply(&self, x: &Element) -> Element {
        Element::from_real_coords(self.factor, &(&self.mat * x.to_real()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &RealLinearMap) -> RealLinearMap {
        RealLinearMap { factor: self.factor, mat: &self.mat * &other.mat }
    }

    pub fn scale(&self, s: f64) -> RealLinearMap {
        RealLinearMap { factor: self.factor, mat: &self.mat * s }
    }

    /// Largest singular value; the trace-norm operator norm.
    pub fn op_norm(&self) -> f64 {
        op_norm_real(&self.mat)
    }

    /// `‖M J − J M‖`; zero for complex-linear maps.
    pub fn complex_linearity_defect(&self) -> f64 {
        let j = RealLinearMap::complex_structure(self.factor);
        op_norm_real(&(&self.mat * &j.mat - &j.mat * &self.mat))
    }

    /// `‖M J + J M‖`; zero for conjugate-linear maps.
    pub fn conjugate_linearity_defect(&self) -> f64 {
        let j = RealLinearMap::complex_structure(self.factor);
        op_norm_real(&(&self.mat * &j.mat + &j.mat * &self.mat))
    }

    /// Eigenvalues (ascending) of the symmetric part. Each eigenvalue of a
    /// complex-linear self-adjoint map appears twice.
    pub fn sym_eigenvalues(&self) -> Vec<f64> {
        sym_eigen(&self.mat).0
    }
}

impl Add for &RealLinearMap {
    type Output = RealLinearMap;
    fn add(self, rhs: &RealLinearMap) -> RealLinearMap {
        RealLinearMap { factor: self.factor, mat: &self.mat + &rhs.mat }
    }
}

impl Sub for &RealLinearMap {
    type Output = RealLinearMap;
    fn sub(self, rhs: &RealLinearMap) -> RealLinearMap {
        RealLinearMap { factor: self.factor, mat: &self.mat - &rhs.mat }
    }
}

impl Mul for &RealLinearMap {
    type Output = RealLinearMap;
    fn mul(self, rhs: &RealLinearMap) -> RealLinearMap {
        self.compose(rhs)
    }
}

/// `L(a, b) x = {a, b, x}`.
pub fn operator_l(a: &Element, b: &Element) -> Result<RealLinearMap> {
    a.same_factor(b)?;
    Ok(RealLinearMap::from_fn(a.factor(), |x| Element::triple(a, b, x)))
}

/// `Q(a) x = {a, x, a}`.
pub fn operator_q(a: &Element) -> RealLinearMap {
    RealLinearMap::from_fn(a.factor(), |x| Element::triple(a, x, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn l_of_zero_is_zero() {
        let f = FactorDescriptor::Type1 { rows: 2, cols: 2 };
        let z = Element::zero(f);
        assert_eq!(operator_l(&z, &z).unwrap(), RealLinearMap::zero(f));
    }

    #[test]
    fn l_e11_spectrum() {
        let f = FactorDescriptor::Type1 { rows: 2, cols: 2 };
        let e = Element::unit(f, 0, 0);
        let l = operator_l(&e, &e).unwrap();
        let ev = l.sym_eigenvalues();
        let want = [0.0, 0.0, 0.5, 0.5, 0.5, 0.5, 1.0, 1.0];
        for (a, b) in ev.iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(l.complex_linearity_defect() < 1e-12);
    }

    #[test]
    fn q_is_conjugate_linear() {
        let f = FactorDescriptor::Type1 { rows: 2, cols: 2 };
        let e = Element::unit(f, 0, 0);
        let q = operator_q(&e);
        let ie = e.scale(C64::new(0.0, 1.0));
        assert!(q.apply(&ie).dist(&e.scale(C64::new(0.0, -1.0))) < 1e-14);
        assert!(q.conjugate_linearity_defect() < 1e-12);
    }

    #[test]
    fn complex_structure_squares_to_minus_one() {
        let f = FactorDescriptor::Spin { dim: 3 };
        let j = RealLinearMap::complex_structure(f);
        let jj = j.compose(&j);
        assert!((&jj + &RealLinearMap::identity(f)).op_norm() < 1e-15);
    }
}
