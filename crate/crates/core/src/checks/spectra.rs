use rand::Rng;

use super::{Audit, CheckResult};
use crate::error::{Error, Result};
use crate::factor::Element;
use crate::peirce::{p0, p2, tripotent_defect, Tripotent};
use crate::random::{element_with_values, perturbation};
use crate::spectral::{atomic_decompose, AtomicDecomposition};
use crate::tol;

/// `sup_n |λ_n(x) − λ_n(y)| ≤ ‖x − y‖`, shorter lists padded with zeros.
pub fn check_weyl(x: &Element, y: &Element) -> Result<CheckResult> {
    x.same_factor(y)?;
    let (dx, dy) = (atomic_decompose(x), atomic_decompose(y));
    let len = dx.len().max(dy.len());
    let sup = (1..=len).map(|n| (dx.lambda(n) - dy.lambda(n)).abs()).fold(0.0, f64::max);
    let mut a = Audit::new("weyl");
    a.digest_element(x);
    a.digest_element(y);
    a.le("sup_gap", sup, x.dist(y));
    a.add_samples(1);
    Ok(a.finish())
}

/// `λ_n(P2(e)x) ≤ λ_n(x)` and `λ_n(P0(e)x) ≤ λ_n(x)` for every `n`.
pub fn check_interlacing(x: &Element, e: &Tripotent) -> Result<CheckResult> {
    x.same_factor(e.element())?;
    let defect = tripotent_defect(e.element());
    if defect > tol::membership(e.element().max_abs()) {
        return Err(Error::NotATripotent(defect));
    }
    let dx = atomic_decompose(x);
    let d2 = atomic_decompose(&p2(e.element(), x));
    let d0 = atomic_decompose(&p0(e.element(), x));
    let mut a = Audit::new("interlacing");
    a.digest_element(x);
    a.digest_element(e.element());
    for (key, d) in [("p2", &d2), ("p0", &d0)] {
        for n in 1..=d.len().max(1) {
            a.le(key, d.lambda(n), dx.lambda(n));
        }
    }
    a.add_samples(1);
    Ok(a.finish())
}

/// Truncation of the atomic decomposition to its first `k` atoms.
fn truncate(dec: &AtomicDecomposition, x: &Element, k: usize) -> Element {
    let f = x.factor();
    dec.lambdas
        .iter()
        .zip(&dec.atoms)
        .take(k)
        .fold(Element::zero(f), |acc, (l, v)| &acc + &v.element().scale_re(*l))
}

/// `λ_n(x) = min {‖x − a‖ : rank(a) ≤ n − 1}`: the truncation attains it and no
/// random probe of rank at most `n − 1` beats it.
pub fn check_distance_to_rank<R: Rng + ?Sized>(
    x: &Element,
    n: usize,
    trials: usize,
    rng: &mut R,
) -> Result<CheckResult> {
    if n == 0 {
        return Err(Error::RankMismatch { expected: 1, got: 0 });
    }
    let f = x.factor();
    let dec = atomic_decompose(x);
    let ln = dec.lambda(n);
    let mut a = Audit::new("distance_to_rank");
    a.digest_element(x);
    a.digest_u64(n as u64);
    let best = truncate(&dec, x, n - 1);
    a.eq("truncation", x.dist(&best), ln, tol::eq(dec.lambda(1)));
    let scale = dec.lambda(1).max(1.0);
    for t in 0..trials {
        let probe = if t % 2 == 0 {
            // Near the optimum: truncate a perturbed copy of x.
            let r = scale * rng.random::<f64>() * 0.5;
            let z = x + &perturbation(f, r, rng);
            truncate(&atomic_decompose(&z), &z, n - 1)
        } else {
            let vals: Vec<f64> = (0..n - 1).map(|_| 2.0 * scale * rng.random::<f64>()).collect();
            element_with_values(f, &vals, rng)
        };
        a.ge("probe", x.dist(&probe), ln);
    }
    a.add_samples(trials + 1);
    Ok(a.finish())
}
