//! Atomic and spectral decompositions, the seminorms `‖·‖_v` and
//! `‖·‖_{p,u_1..u_n}`, support tripotents and interval resolutions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{Element, FactorDescriptor};
use crate::linalg::{herm_eigen, orthonormalize, svd_sorted, sym_eigen, CMat, CVec, RMat, C64, ZERO};
use crate::peirce::{p2, Tripotent};
use crate::tol;

/// `x = Σ λ_i v_i` with `λ` nonincreasing and `v_i` orthogonal minimal tripotents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomicDecomposition {
    pub lambdas: Vec<f64>,
    pub atoms: Vec<Tripotent>,
}

impl AtomicDecomposition {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// `λ_n` with 1-based `n`, zero beyond the last atom.
    pub fn lambda(&self, n: usize) -> f64 {
        if n == 0 {
            return f64::INFINITY;
        }
        self.lambdas.get(n - 1).copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self, factor: FactorDescriptor) -> Element {
        self.lambdas
            .iter()
            .zip(&self.atoms)
            .fold(Element::zero(factor), |acc, (l, a)| &acc + &a.element().scale_re(*l))
    }

    /// `v_1 + … + v_k`.
    pub fn head_tripotent(&self, factor: FactorDescriptor, k: usize) -> Tripotent {
        Tripotent::orthogonal_sum(factor, &self.atoms[..k.min(self.atoms.len())])
    }
}

/// Distinct singular values with their resolution tripotents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub sigmas: Vec<f64>,
    pub resolutions: Vec<Tripotent>,
    pub multiplicities: Vec<usize>,
}

/// A maximal family of mutually orthogonal minimal tripotents in some `U2(e)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub tripotents: Vec<Tripotent>,
}

impl Frame {
    pub fn len(&self) -> usize {
        self.tripotents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tripotents.is_empty()
    }

    pub fn sum(&self, factor: FactorDescriptor) -> Tripotent {
        Tripotent::orthogonal_sum(factor, &self.tripotents)
    }
}

pub fn atomic_decompose(x: &Element) -> AtomicDecomposition {
    let f = x.factor();
    let pairs: Vec<(f64, Element)> = match f {
        FactorDescriptor::Type1 { .. } => atoms_type1(x),
        FactorDescriptor::Type2 { .. } => atoms_type2(x),
        FactorDescriptor::Type3 { .. } => atoms_type3(x),
        FactorDescriptor::Spin { .. } => atoms_spin(x),
    };
    let top = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    let mut kept: Vec<(f64, Element)> = pairs
        .into_iter()
        .filter(|(l, _)| *l > 0.0 && *l > tol::ZERO * top)
        .collect();
    kept.sort_by(|a, b| b.0.total_cmp(&a.0));
    AtomicDecomposition {
        lambdas: kept.iter().map(|p| p.0).collect(),
        atoms: kept.into_iter().map(|p| Tripotent::with_rank_unchecked(p.1, 1)).collect(),
    }
}

fn rank_one(f: FactorDescriptor, u: &CVec, w: &CVec) -> Element {
    Element::raw(f, u * w.transpose())
}

fn atoms_type1(x: &Element) -> Vec<(f64, Element)> {
    let (s, u, v) = svd_sorted(x.data());
    (0..s.len())
        .map(|k| {
            let vbar = v.column(k).map(|z| z.conj());
            (s[k], rank_one(x.factor(), &u.column(k).into_owned(), &vbar))
        })
        .collect()
}

/// Takagi factorisation `A = Σ σ u uᵀ` through the real symmetric matrix
/// `[[B, C], [C, −B]]` for `A = B + iC`.
fn atoms_type3(x: &Element) -> Vec<(f64, Element)> {
    let a = x.data();
    let n = a.nrows();
    let mut m = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let (b, c) = (a[(i, j)].re, a[(i, j)].im);
            m[(i, j)] = b;
            m[(i, n + j)] = c;
            m[(n + i, j)] = c;
            m[(n + i, n + j)] = -b;
        }
    }
    let (vals, vecs) = sym_eigen(&m);
    (n..2 * n)
        .map(|k| {
            let u = CVec::from_fn(n, |i, _| C64::new(vecs[(i, k)], vecs[(n + i, k)]));
            (vals[k], rank_one(x.factor(), &u, &u))
        })
        .collect()
}

/// Skew matrices: deflate one `u1 ∧ u2` block at a time, then reorthonormalise
/// the collected vectors and recompute the weights.
fn atoms_type2(x: &Element) -> Vec<(f64, Element)> {
    let a = x.data();
    let n = a.nrows();
    let scale = crate::linalg::singular_values(a).first().copied().unwrap_or(0.0);
    if scale == 0.0 {
        return vec![];
    }
    let mut r = a.clone();
    let mut vecs: Vec<CVec> = Vec::new();
    for _ in 0..n / 2 {
        let (vals, ev) = herm_eigen(&(&r * r.adjoint()));
        let top = *vals.last().unwrap();
        if top.max(0.0).sqrt() <= tol::ZERO * scale {
            break;
        }
        let u1 = ev.column(n - 1).into_owned();
        let w = &r * u1.map(|z| z.conj());
        let lam = w.norm();
        let u2 = w / C64::new(-lam, 0.0);
        r -= wedge(&u1, &u2) * C64::new(lam, 0.0);
        vecs.push(u1);
        vecs.push(u2);
    }
    let q = orthonormalize(&vecs, 1e-6);
    if q.len() != vecs.len() {
        return vec![];
    }
    q.chunks(2)
        .map(|p| {
            let lam = p[0].dotc(&(a * p[1].map(|z| z.conj()))).re;
            let (u1, u2) = if lam < 0.0 { (&p[1], &p[0]) } else { (&p[0], &p[1]) };
            (lam.abs(), Element::raw(x.factor(), wedge(u1, u2)))
        })
        .collect()
}

fn wedge(u: &CVec, w: &CVec) -> CMat {
    u * w.transpose() - w * u.transpose()
}

/// Closed form on the spin factor. With `φ = arg(x·x)` the rotated vector
/// `e^{-iφ/2} x = p + iq` has `p ⊥ q`, `|p| ≥ |q|`, giving
/// `λ = |p| ± |q|` and atoms `e^{iφ/2}(a ± ib)/2`.
fn atoms_spin(x: &Element) -> Vec<(f64, Element)> {
    let f = x.factor();
    let v = x.spin_vector();
    let d = v.len();
    let xx = v.iter().fold(ZERO, |acc, z| acc + z * z);
    let phi = if xx.norm() > 0.0 { xx.arg() } else { 0.0 };
    let mut phase = C64::from_polar(1.0, phi / 2.0);
    let mut y = &v * phase.conj();
    let norm_of = |t: &[f64]| t.iter().map(|s| s * s).sum::<f64>().sqrt();
    let re = |y: &CVec| y.iter().map(|z| z.re).collect::<Vec<f64>>();
    let im = |y: &CVec| y.iter().map(|z| z.im).collect::<Vec<f64>>();
    if norm_of(&re(&y)) < norm_of(&im(&y)) {
        // Only reachable through rounding when x·x ≈ 0: absorb a factor i.
        y *= C64::new(0.0, -1.0);
        phase *= C64::new(0.0, 1.0);
    }
    let (p, q) = (re(&y), im(&y));
    let (np, nq) = (norm_of(&p), norm_of(&q));
    if np == 0.0 {
        return vec![];
    }
    let a: Vec<f64> = p.iter().map(|t| t / np).collect();
    let mut b: Vec<f64> = if nq > 1e-14 * np {
        q.iter().map(|t| t / nq).collect()
    } else {
        let k = (0..d).min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs())).unwrap();
        (0..d).map(|i| if i == k { 1.0 } else { 0.0 }).collect()
    };
    let ab: f64 = a.iter().zip(&b).map(|(s, t)| s * t).sum();
    for i in 0..d {
        b[i] -= ab * a[i];
    }
    let nb = b.iter().map(|t| t * t).sum::<f64>().sqrt();
    b.iter_mut().for_each(|t| *t /= nb);

    let w = CVec::from_fn(d, |i, _| C64::new(a[i] / 2.0, b[i] / 2.0));
    let wbar = w.map(|z| z.conj());
    let u1 = Element::raw(f, CMat::from_column_slice(d, 1, (&w * phase).as_slice()));
    let u2 = Element::raw(f, CMat::from_column_slice(d, 1, (&wbar * phase).as_slice()));
    vec![(np + nq, u1), (np - nq, u2)]
}

/// Group atoms whose weights differ by at most `τ_gap·λ_1`.
pub fn spectral_decompose(x: &Element) -> SpectralDecomposition {
    let dec = atomic_decompose(x);
    let f = x.factor();
    let mut out = SpectralDecomposition { sigmas: vec![], resolutions: vec![], multiplicities: vec![] };
    if dec.is_empty() {
        return out;
    }
    let thr = tol::GAP * dec.lambdas[0];
    let mut start = 0;
    for i in 1..=dec.len() {
        if i == dec.len() || dec.lambdas[i - 1] - dec.lambdas[i] > thr {
            let k = i - start;
            out.sigmas.push(dec.lambdas[start..i].iter().sum::<f64>() / k as f64);
            out.resolutions.push(Tripotent::orthogonal_sum(f, &dec.atoms[start..i]));
            out.multiplicities.push(k);
            start = i;
        }
    }
    out
}

/// `‖x‖_v = ‖P2(v){x,x,v}‖^{1/2}` for a minimal tripotent `v`.
pub fn seminorm_v(x: &Element, v: &Tripotent) -> Result<f64> {
    if !v.is_minimal() {
        return Err(Error::NotMinimal);
    }
    x.same_factor(v.element())?;
    let ve = v.element();
    Ok(p2(ve, &Element::triple(x, x, ve)).norm().sqrt())
}

/// `(Σ ‖x‖_{u_i}^p)^{1/p}` over mutually orthogonal minimal tripotents.
pub fn seminorm_p(x: &Element, us: &[Tripotent], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::BadExponent(p));
    }
    for (i, u) in us.iter().enumerate() {
        for w in &us[i + 1..] {
            if Element::triple(u.element(), u.element(), w.element()).norm() > tol::eq(1.0) {
                return Err(Error::NotOrthogonal);
            }
        }
    }
    let mut acc = 0.0;
    for u in us {
        acc += seminorm_v(x, u)?.powf(p);
    }
    Ok(acc.powf(1.0 / p))
}

/// Support tripotent `s(x)`: the resolution at the top singular value when it
/// equals 1, and zero otherwise.
pub fn support_tripotent(x: &Element, require_norm_one: bool) -> Result<Tripotent> {
    let n = x.norm();
    let at_one = (n - 1.0).abs() <= tol::EQ;
    if require_norm_one && !at_one {
        return Err(Error::NotNormOne(n));
    }
    if !at_one {
        return Ok(Tripotent::zero(x.factor()));
    }
    Ok(spectral_decompose(x).resolutions.swap_remove(0))
}

/// Sum of the atoms with weight in `[lo, hi]`.
pub fn spectral_resolution(x: &Element, lo: f64, hi: f64) -> Result<Tripotent> {
    let dec = atomic_decompose(x);
    resolution_from(&dec, x.factor(), lo, hi)
}

pub(crate) fn resolution_from(
    dec: &AtomicDecomposition,
    f: FactorDescriptor,
    lo: f64,
    hi: f64,
) -> Result<Tripotent> {
    let thr = tol::GAP * dec.lambda(1).max(1.0);
    let mut parts = Vec::new();
    for (l, a) in dec.lambdas.iter().zip(&dec.atoms) {
        for b in [lo, hi] {
            if (l - b).abs() <= thr {
                return Err(Error::BoundaryCollision { value: *l, boundary: b });
            }
        }
        if *l >= lo && *l <= hi {
            parts.push(a.clone());
        }
    }
    Ok(Tripotent::orthogonal_sum(f, &parts))
}

/// `r = Σ v_i` over atoms with `λ_i > τ_rank·λ_1`.
pub fn range_tripotent(x: &Element) -> Result<Tripotent> {
    let dec = atomic_decompose(x);
    if dec.is_empty() {
        return Err(Error::ZeroElement);
    }
    let cut = tol::RANK * dec.lambdas[0];
    let parts: Vec<Tripotent> = dec
        .lambdas
        .iter()
        .zip(&dec.atoms)
        .filter(|(l, _)| **l > cut)
        .map(|(_, a)| a.clone())
        .collect();
    Ok(Tripotent::orthogonal_sum(x.factor(), &parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peirce::{is_tripotent, relation};

    fn t1(r: usize, c: usize) -> FactorDescriptor {
        FactorDescriptor::Type1 { rows: r, cols: c }
    }

    fn diag(f: FactorDescriptor, d: &[f64]) -> Element {
        let (r, c) = f.shape();
        let mut m = CMat::zeros(r, c);
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = C64::new(*v, 0.0);
        }
        Element::new(f, m).unwrap()
    }

    fn check_valid(x: &Element) {
        let dec = atomic_decompose(x);
        let f = x.factor();
        assert!(dec.reconstruct(f).dist(x) <= tol::eq(x.norm()));
        for w in dec.lambdas.windows(2) {
            assert!(w[0] >= w[1]);
        }
        for (i, a) in dec.atoms.iter().enumerate() {
            assert!(is_tripotent(a.element()));
            assert_eq!(Tripotent::new(a.element().clone()).unwrap().rank(), 1);
            for b in &dec.atoms[i + 1..] {
                assert!(relation(a, b).unwrap().orthogonal);
            }
        }
    }

    #[test]
    fn atomic_examples() {
        let f = t1(2, 2);
        assert!(atomic_decompose(&Element::zero(f)).is_empty());
        let x = Element::from_real(f, &[0.0, 3.0, 0.0, 0.0]).unwrap();
        let d = atomic_decompose(&x);
        assert_eq!(d.len(), 1);
        assert!((d.lambdas[0] - 3.0).abs() < 1e-14);
        assert!(d.atoms[0].element().dist(&Element::unit(f, 0, 1)) < 1e-14);

        let s = FactorDescriptor::Spin { dim: 2 };
        let x = Element::from_real(s, &[1.0, 0.0]).unwrap();
        let d = atomic_decompose(&x);
        assert_eq!(d.lambdas.len(), 2);
        assert!((d.lambdas[0] - 1.0).abs() < 1e-14 && (d.lambdas[1] - 1.0).abs() < 1e-14);
        check_valid(&x);
    }

    #[test]
    fn backends_on_structured_inputs() {
        let t2 = FactorDescriptor::Type2 { n: 4 };
        let mut m = CMat::zeros(4, 4);
        m[(0, 1)] = C64::new(2.0, 0.0);
        m[(1, 0)] = C64::new(-2.0, 0.0);
        m[(2, 3)] = C64::new(0.0, 1.0);
        m[(3, 2)] = C64::new(0.0, -1.0);
        let x = Element::new(t2, m).unwrap();
        let d = atomic_decompose(&x);
        assert_eq!(d.len(), 2);
        assert!((d.lambdas[0] - 2.0).abs() < 1e-12 && (d.lambdas[1] - 1.0).abs() < 1e-12);
        check_valid(&x);

        let t3 = FactorDescriptor::Type3 { n: 3 };
        let x = Element::from_complex(t3, &[
            C64::new(1.0, 0.5), C64::new(0.2, 0.0), C64::new(0.0, 0.3),
            C64::new(0.2, 0.0), C64::new(-0.4, 0.1), C64::new(0.0, 0.0),
            C64::new(0.0, 0.3), C64::new(0.0, 0.0), C64::new(0.7, -0.2),
        ]).unwrap();
        check_valid(&x);

        let s = FactorDescriptor::Spin { dim: 4 };
        let x = Element::from_complex(s, &[
            C64::new(0.3, 1.0), C64::new(-0.5, 0.2), C64::new(0.0, -0.4), C64::new(1.2, 0.0),
        ]).unwrap();
        check_valid(&x);
        let d = atomic_decompose(&x);
        assert!((d.lambdas[0] - x.norm()).abs() < 1e-12);
        // a multiple of a minimal tripotent has a single atom
        let u = Element::from_complex(s, &[C64::new(0.5, 0.0), C64::new(0.0, 0.5), ZERO, ZERO]).unwrap();
        assert_eq!(atomic_decompose(&u.scale(C64::new(0.0, 2.0))).len(), 1);
        // a purely imaginary vector exercises the swapped branch
        let y = Element::from_complex(s, &[C64::new(0.0, 1.0), C64::new(0.0, -2.0), ZERO, C64::new(0.1, 0.3)]).unwrap();
        check_valid(&y);
    }

    #[test]
    fn spectral_examples() {
        let f = t1(3, 3);
        let s = spectral_decompose(&diag(f, &[2.0, 1.0]));
        assert_eq!(s.sigmas.len(), 2);
        assert!(s.resolutions[0].element().dist(&Element::unit(f, 0, 0)) < 1e-14);
        let s = spectral_decompose(&diag(f, &[1.0, 1.0, 0.3]));
        assert_eq!(s.multiplicities, vec![2, 1]);
        assert!((s.sigmas[1] - 0.3).abs() < 1e-14);
        assert!(s.resolutions[0].element().dist(&diag(f, &[1.0, 1.0])) < 1e-14);
        assert_eq!(s.resolutions[0].rank(), 2);
        let e = diag(f, &[1.0, 0.0, 1.0]);
        let s = spectral_decompose(&e);
        assert_eq!(s.sigmas.len(), 1);
        assert!(s.resolutions[0].element().dist(&e) < 1e-14);
    }

    #[test]
    fn seminorm_examples() {
        let f = t1(2, 2);
        let v = Tripotent::new(Element::unit(f, 0, 0)).unwrap();
        assert!((seminorm_v(v.element(), &v).unwrap() - 1.0).abs() < 1e-15);
        assert!((seminorm_v(&diag(f, &[2.0, 1.0]), &v).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(seminorm_v(&Element::unit(f, 1, 1), &v).unwrap(), 0.0);
        let id = Tripotent::new(diag(f, &[1.0, 1.0])).unwrap();
        assert_eq!(seminorm_v(&id.element().clone(), &id), Err(Error::NotMinimal));

        let t3 = FactorDescriptor::Type3 { n: 2 };
        let a = Element::from_real(t3, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let u1 = Tripotent::new(Element::unit(t3, 0, 0)).unwrap();
        let u2 = Tripotent::new(diag(t3, &[0.0, 1.0])).unwrap();
        let val = seminorm_p(&a, &[u1.clone(), u2.clone()], 1.0).unwrap();
        assert!((val - 2f64.sqrt()).abs() < 1e-12);
        assert!((seminorm_p(&a, std::slice::from_ref(&u1), 1.0).unwrap() - seminorm_v(&a, &u1).unwrap()).abs() < 1e-15);
        assert_eq!(seminorm_p(&a, std::slice::from_ref(&u1), 0.5), Err(Error::BadExponent(0.5)));
        assert_eq!(seminorm_p(&a, &[u1.clone(), u1.clone()], 1.0), Err(Error::NotOrthogonal));

        let f3 = t1(3, 3);
        let x = diag(f3, &[3.0, 2.0, 1.0]);
        let us = [Tripotent::new(Element::unit(f3, 0, 0)).unwrap(), Tripotent::new(Element::unit(f3, 1, 1)).unwrap()];
        assert!((seminorm_p(&x, &us, 1.0).unwrap() - 5.0).abs() < 1e-13);
    }

    #[test]
    fn support_examples() {
        let f = t1(3, 3);
        let e = diag(f, &[1.0, 0.0, 1.0]);
        assert!(support_tripotent(&e, true).unwrap().element().dist(&e) < 1e-14);
        let x = diag(f, &[1.0, 0.5]);
        assert!(support_tripotent(&x, true).unwrap().element().dist(&Element::unit(f, 0, 0)) < 1e-14);
        let x = diag(f, &[1.0, 1.0, 0.3]);
        let s = support_tripotent(&x, true).unwrap();
        assert_eq!(s.rank(), 2);
        assert!(matches!(support_tripotent(&diag(f, &[0.5]), true), Err(Error::NotNormOne(_))));
        assert!(support_tripotent(&diag(f, &[0.5]), false).unwrap().is_zero());
    }

    #[test]
    fn resolution_examples() {
        let f = t1(3, 3);
        let x = diag(f, &[1.0, 1.0, 0.3]);
        let all = spectral_resolution(&x, 0.1, 2.0).unwrap();
        assert!(all.element().dist(&range_tripotent(&x).unwrap().element().clone()) < 1e-14);
        let top = spectral_resolution(&x, 0.9, 1.1).unwrap();
        assert!(top.element().dist(&diag(f, &[1.0, 1.0])) < 1e-14);
        let f2 = t1(2, 2);
        let y = diag(f2, &[1.0, 0.3]);
        let low = spectral_resolution(&y, 0.29, 0.31).unwrap();
        assert!(low.element().dist(&diag(f2, &[0.0, 1.0])) < 1e-14);
        assert!(matches!(spectral_resolution(&y, 0.3, 0.31), Err(Error::BoundaryCollision { .. })));
    }

    #[test]
    fn range_examples() {
        let f = t1(2, 2);
        let e12 = Element::unit(f, 0, 1);
        assert!(range_tripotent(&e12).unwrap().element().dist(&e12) < 1e-14);
        assert!(range_tripotent(&diag(f, &[2.0, 1.0])).unwrap().element().dist(&diag(f, &[1.0, 1.0])) < 1e-14);
        assert!(range_tripotent(&e12.scale_re(3.0)).unwrap().element().dist(&e12) < 1e-14);
        assert_eq!(range_tripotent(&Element::zero(f)), Err(Error::ZeroElement));
    }
}
