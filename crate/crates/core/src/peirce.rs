//! Tripotents, Peirce projections and the relations between tripotents.

use serde::{Deserialize, Serialize};

use crate::checks::{Audit, CheckResult};
use crate::error::{Error, Result};
use crate::factor::{Element, FactorDescriptor};
use crate::linalg::{sym_eigen, RMat};
use crate::realmap::{operator_l, operator_q, RealLinearMap};
use crate::spectral::atomic_decompose;
use crate::tol;

/// An element verified to satisfy `{e,e,e} = e`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tripotent {
    element: Element,
    rank: usize,
}

impl Tripotent {
    /// Verify `e` and cache its rank (number of unit singular values).
    pub fn new(e: Element) -> Result<Self> {
        let d = tripotent_defect(&e);
        if d > tol::eq(e.norm()) {
            return Err(Error::NotATripotent(d));
        }
        let rank = atomic_decompose(&e).lambdas.iter().filter(|&&l| l > 0.5).count();
        Ok(Tripotent { element: e, rank })
    }

    /// Build a tripotent whose rank is known by construction.
    pub(crate) fn with_rank_unchecked(e: Element, rank: usize) -> Self {
        Tripotent { element: e, rank }
    }

    pub fn zero(factor: FactorDescriptor) -> Self {
        Tripotent { element: Element::zero(factor), rank: 0 }
    }

    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn into_element(self) -> Element {
        self.element
    }

    pub fn factor(&self) -> FactorDescriptor {
        self.element.factor()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_minimal(&self) -> bool {
        self.rank == 1
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0
    }

    /// Sum of mutually orthogonal tripotents.
    pub fn orthogonal_sum(factor: FactorDescriptor, parts: &[Tripotent]) -> Tripotent {
        let e = parts.iter().fold(Element::zero(factor), |acc, p| &acc + p.element());
        Tripotent { element: e, rank: parts.iter().map(|p| p.rank).sum() }
    }
}

impl Serialize for Tripotent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.element.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tripotent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let e = Element::deserialize(d)?;
        Tripotent::new(e).map_err(serde::de::Error::custom)
    }
}

/// `‖{x,x,x} − x‖`.
pub fn tripotent_defect(x: &Element) -> f64 {
    Element::triple(x, x, x).dist(x)
}

pub fn is_tripotent(x: &Element) -> bool {
    tripotent_defect(x) <= tol::eq(x.norm())
}

/// `P2(e) x = {e, {e, x, e}, e}`.
pub fn p2(e: &Element, x: &Element) -> Element {
    Element::triple(e, &Element::triple(e, x, e), e)
}

/// `P1(e) x = 2({e,e,x} − P2(e) x)`.
pub fn p1(e: &Element, x: &Element) -> Element {
    (&Element::triple(e, e, x) - &p2(e, x)).scale_re(2.0)
}

/// `P0(e) x = x − 2{e,e,x} + P2(e) x`.
pub fn p0(e: &Element, x: &Element) -> Element {
    &(x - &Element::triple(e, e, x).scale_re(2.0)) + &p2(e, x)
}

/// Peirce projection `P_k(e) x` for `k ∈ {0, 1, 2}`.
pub fn project(k: usize, e: &Element, x: &Element) -> Element {
    match k {
        0 => p0(e, x),
        1 => p1(e, x),
        2 => p2(e, x),
        _ => panic!("Peirce index must be 0, 1 or 2"),
    }
}

/// Distance of `x` from `U_k(e)` measured as `‖P_k(e)x − x‖`.
pub fn peirce_defect(k: usize, e: &Element, x: &Element) -> f64 {
    project(k, e, x).dist(x)
}

#[derive(Clone, Debug)]
pub struct PeirceSystem {
    pub e: Tripotent,
    pub p2: RealLinearMap,
    pub p1: RealLinearMap,
    pub p0: RealLinearMap,
    /// Complex dimensions of `(U2, U1, U0)`.
    pub dims: [usize; 3],
}

impl PeirceSystem {
    pub fn projection(&self, k: usize) -> &RealLinearMap {
        match k {
            0 => &self.p0,
            1 => &self.p1,
            2 => &self.p2,
            _ => panic!("Peirce index must be 0, 1 or 2"),
        }
    }

    /// Orthonormal real basis (columns) of the realified `U_k(e)`.
    pub fn real_basis(&self, k: usize) -> RMat {
        range_basis(self.projection(k).matrix())
    }
}

/// Orthonormal basis of the range of a symmetric real projection.
pub(crate) fn range_basis(p: &RMat) -> RMat {
    let (vals, vecs) = sym_eigen(p);
    let cols: Vec<_> = (0..vals.len())
        .filter(|&i| vals[i] > 0.5)
        .map(|i| vecs.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        RMat::zeros(p.nrows(), 0)
    } else {
        RMat::from_columns(&cols)
    }
}

/// Peirce-space dimensions from the spectrum of `L(e,e)`.
pub fn peirce_dims(e: &Element) -> Result<[usize; 3]> {
    let l = operator_l(e, e)?;
    let mut counts = [0usize; 3];
    for ev in l.sym_eigenvalues() {
        let slot = [(1.0, 0usize), (0.5, 1), (0.0, 2)]
            .iter()
            .find(|(c, _)| (ev - c).abs() <= tol::PEIRCE_BUCKET)
            .map(|&(_, s)| s)
            .ok_or_else(|| {
                let gap = [0.0, 0.5, 1.0].iter().map(|c| (ev - c).abs()).fold(f64::INFINITY, f64::min);
                Error::NotATripotent(gap)
            })?;
        counts[slot] += 1;
    }
    Ok([counts[0] / 2, counts[1] / 2, counts[2] / 2])
}

pub fn peirce(e: &Tripotent) -> Result<PeirceSystem> {
    let el = e.element();
    let f = el.factor();
    let dims = peirce_dims(el)?;
    let l = operator_l(el, el)?;
    let q = operator_q(el);
    let p2 = q.compose(&q);
    let p1 = (&l - &p2).scale(2.0);
    let p0 = &(&RealLinearMap::identity(f) - &l.scale(2.0)) + &p2;
    Ok(PeirceSystem { e: e.clone(), p2, p1, p0, dims })
}

pub fn rank(e: &Tripotent) -> usize {
    e.rank()
}

pub fn is_minimal(e: &Tripotent) -> bool {
    e.is_minimal()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub orthogonal: bool,
    pub leq: bool,
    pub collinear: bool,
    pub governs_uv: bool,
    pub governs_vu: bool,
}

/// Order, orthogonality, collinearity and governing between two tripotents.
/// `leq` reports `u ≤ v`.
pub fn relation(u: &Tripotent, v: &Tripotent) -> Result<Relation> {
    let (a, b) = (u.element(), v.element());
    a.same_factor(b)?;
    let t = tol::eq(1.0);
    let orthogonal = Element::triple(a, a, b).norm() <= t;
    let leq = p2(b, a).dist(a) <= t && p2(a, b).dist(a) <= t;
    let u_in = |k, e: &Element, x: &Element| !x.is_zero() && peirce_defect(k, e, x) <= t;
    let collinear = u_in(1, b, a) && u_in(1, a, b);
    let governs_uv = u_in(2, a, b) && u_in(1, b, a);
    let governs_vu = u_in(2, b, a) && u_in(1, a, b);
    Ok(Relation { orthogonal, leq, collinear, governs_uv, governs_vu })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeRay {
    pub alpha: f64,
    pub delta: f64,
    pub p2part: Element,
    pub p0part: Element,
    /// Whether the normalised nonzero parts verified as minimal tripotents.
    pub p2_minimal: bool,
    pub p0_minimal: bool,
}

/// Peirce-2 and Peirce-0 components of a minimal tripotent relative to `e`.
pub fn extreme_ray_components(e: &Tripotent, v: &Tripotent) -> Result<ExtremeRay> {
    if !v.is_minimal() {
        return Err(Error::NotMinimal);
    }
    let p2part = p2(e.element(), v.element());
    let p0part = p0(e.element(), v.element());
    let alpha = p2part.norm();
    let delta = p0part.norm();
    let minimal_dir = |x: &Element, n: f64| {
        n <= tol::EQ
            || Tripotent::new(x.scale_re(1.0 / n)).map(|t| t.is_minimal()).unwrap_or(false)
    };
    Ok(ExtremeRay {
        alpha,
        delta,
        p2_minimal: minimal_dir(&p2part, alpha),
        p0_minimal: minimal_dir(&p0part, delta),
        p2part,
        p0part,
    })
}

/// Positivity facts for `y = P2(e){x,x,e}` and the Peirce parts `x1, x2`.
pub fn check_peirce_positivity(e: &Tripotent, x: &Element) -> Result<CheckResult> {
    let el = e.element();
    if !is_tripotent(el) {
        return Err(Error::NotATripotent(tripotent_defect(el)));
    }
    x.same_factor(el)?;
    let mut audit = Audit::new("peirce_positivity");
    audit.digest_element(el);
    audit.digest_element(x);

    let y = p2(el, &Element::triple(x, x, el));
    let sys = peirce(e)?;
    let b = sys.real_basis(2);
    let min_eig = if b.ncols() == 0 {
        0.0
    } else {
        let ly = operator_l(&y, el)?;
        let restricted = b.transpose() * ly.matrix() * &b;
        sym_eigen(&restricted).0[0]
    };
    audit.ge("positivity_min_eigenvalue", min_eig, 0.0);

    let ny = y.norm();
    for j in [1usize, 2] {
        let xj = project(j, el, x);
        let bj = Element::triple(&xj, &xj, el).norm();
        audit.le(&format!("bracket_x{j}"), bj, ny);
        audit.le(&format!("norm_sq_x{j}"), xj.norm().powi(2), 4.0 * bj);
    }
    audit.add_samples(1);
    Ok(audit.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn t1(r: usize, c: usize) -> FactorDescriptor {
        FactorDescriptor::Type1 { rows: r, cols: c }
    }

    fn trip(x: Element) -> Tripotent {
        Tripotent::new(x).unwrap()
    }

    #[test]
    fn tripotent_examples() {
        let f = t1(2, 2);
        assert!(is_tripotent(&Element::unit(f, 0, 1)));
        assert!(!is_tripotent(&Element::unit(f, 0, 0).scale_re(0.5)));
        let s = FactorDescriptor::Spin { dim: 2 };
        let u = Element::from_complex(s, &[C64::new(0.5, 0.0), C64::new(0.0, 0.5)]).unwrap();
        assert!(is_tripotent(&u));
        assert!(trip(u).is_minimal());
        assert!(matches!(
            Tripotent::new(Element::unit(f, 0, 0).scale_re(0.5)),
            Err(Error::NotATripotent(_))
        ));
    }

    #[test]
    fn peirce_examples() {
        let f = t1(2, 2);
        let z = peirce(&Tripotent::zero(f)).unwrap();
        assert_eq!(z.dims, [0, 0, 4]);
        assert!((&z.p0 - &RealLinearMap::identity(f)).op_norm() < 1e-15);

        let e11 = peirce(&trip(Element::unit(f, 0, 0))).unwrap();
        assert_eq!(e11.dims, [1, 2, 1]);

        let t3 = FactorDescriptor::Type3 { n: 2 };
        let id = trip(Element::from_real(t3, &[1.0, 0.0, 0.0, 1.0]).unwrap());
        assert_eq!(peirce(&id).unwrap().dims, [3, 0, 0]);
    }

    #[test]
    fn rank_examples() {
        let f = t1(2, 2);
        assert_eq!(Tripotent::zero(f).rank(), 0);
        let e = Element::from_real(f, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(trip(e).rank(), 2);

        let t2 = FactorDescriptor::Type2 { n: 4 };
        let e12 = trip(Element::unit(t2, 0, 1));
        assert_eq!(e12.rank(), 1);
        assert_eq!(peirce(&e12).unwrap().dims[2], 1);
    }

    #[test]
    fn relation_examples() {
        let f = t1(2, 2);
        let e11 = trip(Element::unit(f, 0, 0));
        let e22 = trip(Element::unit(f, 1, 1));
        let e12 = trip(Element::unit(f, 0, 1));
        let id = trip(Element::from_real(f, &[1.0, 0.0, 0.0, 1.0]).unwrap());
        assert!(relation(&e11, &e22).unwrap().orthogonal);
        assert!(relation(&e11, &id).unwrap().leq);
        assert!(!relation(&id, &e11).unwrap().leq);
        let r = relation(&e11, &e12).unwrap();
        assert!(r.collinear && !r.orthogonal);
        let other = trip(Element::unit(FactorDescriptor::Spin { dim: 2 }, 0, 0));
        assert_eq!(relation(&e11, &other), Err(Error::FactorMismatch));
    }

    #[test]
    fn governing_in_type3() {
        let t3 = FactorDescriptor::Type3 { n: 2 };
        let w = trip(Element::unit(t3, 0, 1));
        let e11 = trip(Element::unit(t3, 0, 0));
        assert_eq!(w.rank(), 2);
        let r = relation(&w, &e11).unwrap();
        assert!(r.governs_uv && !r.governs_vu && !r.collinear);
    }

    #[test]
    fn extreme_ray_examples() {
        let f = t1(2, 2);
        let e11 = trip(Element::unit(f, 0, 0));
        let e22 = trip(Element::unit(f, 1, 1));
        let r = extreme_ray_components(&e11, &e22).unwrap();
        assert!(r.alpha.abs() < 1e-15 && (r.delta - 1.0).abs() < 1e-15);
        let r = extreme_ray_components(&e11, &e11).unwrap();
        assert!((r.alpha - 1.0).abs() < 1e-15 && r.delta.abs() < 1e-15);

        let t3 = FactorDescriptor::Type3 { n: 2 };
        let id = trip(Element::from_real(t3, &[1.0, 0.0, 0.0, 1.0]).unwrap());
        let a = trip(Element::from_real(t3, &[0.5, 0.5, 0.5, 0.5]).unwrap());
        assert!(a.is_minimal());
        let r = extreme_ray_components(&id, &a).unwrap();
        assert!((r.alpha - 1.0).abs() < 1e-12 && r.p2_minimal);
        let e11 = trip(Element::unit(t3, 0, 0));
        let r = extreme_ray_components(&e11, &a).unwrap();
        assert!((r.alpha - 0.5).abs() < 1e-12 && (r.delta - 0.5).abs() < 1e-12);
        assert!(r.p2_minimal && r.p0_minimal);
        assert!((r.alpha + r.delta).powi(2) <= 1.0 + tol::INEQ);
        assert_eq!(extreme_ray_components(&e11, &id), Err(Error::NotMinimal));
    }

    #[test]
    fn positivity_examples() {
        let f = t1(2, 2);
        let e11 = trip(Element::unit(f, 0, 0));
        let r = check_peirce_positivity(&e11, e11.element()).unwrap();
        assert!(r.pass);
        let r = check_peirce_positivity(&e11, &Element::unit(f, 0, 1)).unwrap();
        assert!(r.pass);
        assert!((r.measured["norm_sq_x1"] - 1.0).abs() < 1e-12);
        assert!((r.measured["norm_sq_x1.bound"] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn projection_formulas_match_operator_forms() {
        let f = t1(2, 3);
        let e = trip(Element::from_real(f, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap());
        let sys = peirce(&e).unwrap();
        let x = Element::from_complex(f, &[C64::new(0.3, 1.0), C64::new(-0.2, 0.5), C64::new(1.0, 0.0),
            C64::new(0.0, -0.7), C64::new(0.4, 0.4), C64::new(2.0, -1.0)]).unwrap();
        for k in 0..3 {
            assert!(sys.projection(k).apply(&x).dist(&project(k, e.element(), &x)) < 1e-13);
        }
    }
}
