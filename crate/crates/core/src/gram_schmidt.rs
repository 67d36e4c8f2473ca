//! Constructive orthogonalisation: enclosing tripotents, Peirce-2 witnesses,
//! orthogonal complements and the minimax witness.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::factor::{Element, FactorDescriptor};
use crate::linalg::{extend_within, null_space_real, orthonormalize, svd_sorted, CMat, CVec, RMat, RVec, C64};
use crate::peirce::{p2, peirce, peirce_defect, Tripotent};
use crate::realmap::RealLinearMap;
use crate::spectral::{atomic_decompose, AtomicDecomposition};
use crate::tol;

pub use crate::spectral::range_tripotent;

/// Attempts at a randomised construction before giving up.
const ATTEMPTS: u64 = 8;

fn support_vectors(x: &Element) -> (Vec<CVec>, Vec<CVec>) {
    let (s, u, v) = svd_sorted(x.data());
    let top = s.first().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..s.len()).filter(|&k| s[k] > tol::SPAN.max(tol::RANK) * top && s[k] > 0.0).collect();
    (
        keep.iter().map(|&k| u.column(k).into_owned()).collect(),
        keep.iter().map(|&k| v.column(k).into_owned()).collect(),
    )
}

fn standard_basis(n: usize) -> Vec<CVec> {
    (0..n)
        .map(|i| CVec::from_fn(n, |j, _| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }))
        .collect()
}

fn outer_sum(left: &[CVec], right: &[CVec], conj_right: bool) -> CMat {
    let mut m = CMat::zeros(left[0].len(), right[0].len());
    for (a, b) in left.iter().zip(right) {
        if conj_right {
            m += a * b.adjoint();
        } else {
            m += a * b.transpose();
        }
    }
    m
}

/// A tripotent `u` (inside `U2(within)` when given) with every item in `U2(u)`
/// and `rank(u) ≤` the number of items. Items are multiples of minimal
/// tripotents.
pub(crate) fn enclose(factor: FactorDescriptor, items: &[Element], within: Option<&Tripotent>) -> Result<Tripotent> {
    let items: Vec<&Element> = items.iter().filter(|x| x.norm() > tol::EQ).collect();
    if items.is_empty() {
        return Ok(Tripotent::zero(factor));
    }
    let span_tol = tol::SPAN;
    let (pool_l, pool_r) = match within {
        Some(e) if !e.is_zero() => support_vectors(e.element()),
        Some(_) => (vec![], vec![]),
        None => {
            let (r, c) = factor.shape();
            (standard_basis(r), standard_basis(c))
        }
    };
    let mut lefts = Vec::new();
    let mut rights = Vec::new();
    for x in &items {
        let (l, r) = support_vectors(x);
        lefts.extend(l);
        rights.extend(r);
    }
    match factor {
        FactorDescriptor::Type1 { .. } => {
            let l = orthonormalize(&lefts, span_tol);
            let r = orthonormalize(&rights, span_tol);
            let k = l.len().max(r.len());
            let l = extend_within(&l, &pool_l, k, span_tol);
            let r = extend_within(&r, &pool_r, k, span_tol);
            if l.len() < k || r.len() < k {
                return Err(Error::UnsupportedFactor(format!(
                    "{factor}: supports of dimension {} and {} cannot be paired",
                    l.len(),
                    r.len()
                )));
            }
            Ok(Tripotent::with_rank_unchecked(Element::raw(factor, outer_sum(&l, &r, true)), k))
        }
        FactorDescriptor::Type3 { .. } => {
            let w = orthonormalize(&lefts, span_tol);
            let k = w.len();
            Ok(Tripotent::with_rank_unchecked(Element::raw(factor, outer_sum(&w, &w, false)), k))
        }
        FactorDescriptor::Type2 { .. } => {
            let mut w = orthonormalize(&lefts, span_tol);
            if w.len() % 2 == 1 {
                w = extend_within(&w, &pool_l, w.len() + 1, span_tol);
                if w.len() % 2 == 1 {
                    return Err(Error::ConstructionFailed("no room to pair the skew support".into()));
                }
            }
            let a: Vec<CVec> = w.iter().step_by(2).cloned().collect();
            let b: Vec<CVec> = w.iter().skip(1).step_by(2).cloned().collect();
            let m = outer_sum(&a, &b, false) - outer_sum(&b, &a, false);
            Ok(Tripotent::with_rank_unchecked(Element::raw(factor, m), w.len() / 2))
        }
        FactorDescriptor::Spin { .. } => {
            let w1 = items[0];
            let parallel = items.iter().all(|x| {
                let c = x.inner(w1) / w1.inner(w1);
                (*x - &w1.scale(c)).norm() <= tol::eq(x.norm())
            });
            if parallel {
                return range_tripotent(w1);
            }
            match within {
                Some(e) if e.rank() == 2 => Ok(e.clone()),
                Some(_) => Err(Error::ConstructionFailed("non-parallel items inside a minimal U2(e)".into())),
                None => Ok(Tripotent::with_rank_unchecked(Element::unit(factor, 0, 0), 2)),
            }
        }
    }
}

/// A tripotent of rank at most `n` whose Peirce-2 space holds all `n` inputs.
pub fn enclose_minimals(factor: FactorDescriptor, minimals: &[Tripotent]) -> Result<Tripotent> {
    for m in minimals {
        if !m.is_minimal() {
            return Err(Error::NotMinimal);
        }
        if m.factor() != factor {
            return Err(Error::FactorMismatch);
        }
    }
    if let FactorDescriptor::Type2 { .. } = factor {
        return Err(Error::UnsupportedFactor(format!("{factor} is not a JB*-algebra")));
    }
    let items: Vec<Element> = minimals.iter().map(|m| m.element().clone()).collect();
    let u = enclose(factor, &items, None)?;
    for m in minimals {
        if peirce_defect(2, u.element(), m.element()) > tol::eq(1.0) {
            return Err(Error::ConstructionFailed("input escaped the enclosing Peirce-2 space".into()));
        }
    }
    Ok(u)
}

/// Orthonormal real basis of `⋂ U_k(e)` for the given `(k, e)` pairs.
pub(crate) fn peirce_intersection(factor: FactorDescriptor, spaces: &[(usize, &Tripotent)]) -> Result<RMat> {
    let n = 2 * factor.complex_dim();
    let mut stacked = RMat::zeros(n * spaces.len(), n);
    for (i, (k, e)) in spaces.iter().enumerate() {
        let sys = peirce(e)?;
        let block = RealLinearMap::identity(factor).matrix() - sys.projection(*k).matrix();
        stacked.view_mut((i * n, 0), (n, n)).copy_from(&block);
    }
    Ok(null_space_real(&stacked, 1e-8))
}

/// Witness tripotent inside `U2(e)` for one minimal tripotent: every element of
/// `U2(e)` orthogonal to it is orthogonal to `v`. Zero when `v ⊥ U2(e)`.
fn single_witness(e: &Tripotent, v: &Tripotent) -> Result<Option<Tripotent>> {
    let el = e.element();
    let a = p2(el, v.element());
    if a.norm() > tol::RANK {
        return range_tripotent(&a).map(Some);
    }
    let b = p2(el, &Element::triple(v.element(), v.element(), el));
    if b.norm() > tol::RANK {
        return range_tripotent(&b).map(Some);
    }
    Ok(None)
}

/// `u ∈ U2(e)` of rank at most `n` such that `U2(e) ∩ U0(u)` is orthogonal to
/// every input.
pub fn peirce2_witness(e: &Tripotent, minimals: &[Tripotent]) -> Result<Tripotent> {
    let f = e.factor();
    let mut witnesses = Vec::new();
    for m in minimals {
        if !m.is_minimal() {
            return Err(Error::NotMinimal);
        }
        m.element().same_factor(e.element())?;
        if let Some(w) = single_witness(e, m)? {
            witnesses.push(w.into_element());
        }
    }
    let u = enclose(f, &witnesses, Some(e))?;
    let basis = peirce_intersection(f, &[(2, e), (0, &u)])?;
    for k in 0..basis.ncols() {
        let x = Element::from_real_coords(f, &basis.column(k).into_owned());
        for m in minimals {
            if Element::triple(m.element(), m.element(), &x).norm() > tol::eq(1.0) {
                return Err(Error::ConstructionFailed("witness leaves a non-orthogonal direction".into()));
            }
        }
    }
    Ok(u)
}

/// Sum of the `k` heaviest atoms when the decomposition has at least `k`
/// significant atoms.
fn top_atoms(dec: &AtomicDecomposition, f: FactorDescriptor, k: usize) -> Option<Tripotent> {
    let top = dec.lambda(1);
    let significant = dec.lambdas.iter().filter(|&&l| l > 1e-6 * top).count();
    (significant >= k).then(|| dec.head_tripotent(f, k))
}

/// `u ∈ U2(e)` with `rank(u) = rank(e) − rank(f)` and `u ⊥ f`.
pub fn complement_tripotent(e: &Tripotent, f: &Tripotent) -> Result<Tripotent> {
    e.element().same_factor(f.element())?;
    let (m, n) = (e.rank(), f.rank());
    if n >= m {
        return Err(Error::RankOrderViolation { inner: n, outer: m });
    }
    let fac = e.factor();
    if n == 0 {
        return Ok(e.clone());
    }
    let basis = peirce_intersection(fac, &[(2, e), (0, f)])?;
    if basis.ncols() == 0 {
        return Err(Error::ConstructionFailed("U2(e) ∩ U0(f) is trivial".into()));
    }
    let project = |v: &RVec| Element::from_real_coords(fac, &(&basis * (basis.transpose() * v)));
    let mut candidates = vec![project(&e.element().to_real())];
    let mut rng = ChaCha20Rng::seed_from_u64(0x6a74_6c61_6263_6f6d);
    for _ in 0..ATTEMPTS {
        let g = RVec::from_fn(basis.ncols(), |_, _| StandardNormal.sample(&mut rng));
        candidates.push(Element::from_real_coords(fac, &(&basis * g)));
    }
    let t = tol::eq(1.0);
    for z in candidates {
        let Some(u) = top_atoms(&atomic_decompose(&z), fac, m - n) else { continue };
        let inside = peirce_defect(2, e.element(), u.element()) <= t;
        let orth = Element::triple(u.element(), u.element(), f.element()).norm() <= t;
        if inside && orth {
            return Ok(u);
        }
    }
    Err(Error::ConstructionFailed("no complement of the required rank found".into()))
}

/// Minimal `v ∈ U2(e)` with `‖x‖_v ≤ λ_n(x)`, orthogonal to the first `n − 1`
/// atoms of `x`.
pub fn minimax_witness(x_dec: &AtomicDecomposition, e: &Tripotent, n: usize) -> Result<Tripotent> {
    if n == 0 || e.rank() != n {
        return Err(Error::RankMismatch { expected: n, got: e.rank() });
    }
    let fac = e.factor();
    if n == 1 {
        return Ok(e.clone());
    }
    let f = x_dec.head_tripotent(fac, n - 1);
    let u = complement_tripotent(e, &f)?;
    let dec = atomic_decompose(u.element());
    dec.atoms
        .into_iter()
        .next()
        .ok_or_else(|| Error::ConstructionFailed("empty complement".into()))
}
