use rand::Rng;

use super::{Audit, CheckResult};
use crate::error::{Error, Result};
use crate::factor::{Element, FactorDescriptor};
use crate::gram_schmidt::{complement_tripotent, minimax_witness};
use crate::linalg::RMat;
use crate::peirce::{peirce_defect, Tripotent};
use crate::random::{random_frame_in, random_minimal_in, random_tripotent};
use crate::spectral::{atomic_decompose, seminorm_p, seminorm_v, AtomicDecomposition, Frame};
use crate::tol;

fn require_atoms(dec: &AtomicDecomposition, n: usize) -> Result<()> {
    if n == 0 || n > dec.len() {
        return Err(Error::RankMismatch { expected: n, got: dec.len() });
    }
    Ok(())
}

/// Two-sided certificates for `λ_n(x) = max_e inf_v ‖x‖_v = min_f sup_v ‖x‖_v`.
///
/// (i) minimals of `U2(v_1+…+v_n)` see at least `λ_n`; (ii) every random
/// rank-`n` tripotent contains a witness seeing at most `λ_n`; (iii) minimals
/// of `U0(v_1+…+v_{n−1})` see at most `λ_n`; (iv) for every random rank-`(n−1)`
/// tripotent `f` a minimal of `U2(v_1+…+v_n) ∩ U0(f)` sees at least `λ_n`.
pub fn check_minimax<R: Rng + ?Sized>(x: &Element, n: usize, trials: usize, rng: &mut R) -> Result<CheckResult> {
    let fac = x.factor();
    let dec = atomic_decompose(x);
    require_atoms(&dec, n)?;
    let ln = dec.lambda(n);
    let e_star = dec.head_tripotent(fac, n);
    let f_star = dec.head_tripotent(fac, n - 1);
    let t = tol::eq(1.0);
    let mut a = Audit::new("minimax");
    a.digest_element(x);
    a.digest_u64(n as u64);
    a.record("lambda_n", ln);
    for _ in 0..trials {
        match random_minimal_in(&e_star, 2, rng) {
            Some(v) => a.ge("i.sup_side", seminorm_v(x, &v)?, ln),
            None => a.construction_failure("i.sample"),
        }
        match random_tripotent(fac, n, rng) {
            Some(e) => match minimax_witness(&dec, &e, n) {
                Ok(v) => {
                    a.le("ii.witness", seminorm_v(x, &v)?, ln);
                    a.le("ii.membership", peirce_defect(2, e.element(), v.element()), t);
                }
                Err(_) => a.construction_failure("ii.witness"),
            },
            None => a.construction_failure("ii.sample"),
        }
        match random_minimal_in(&f_star, 0, rng) {
            Some(v) => a.le("iii.inf_side", seminorm_v(x, &v)?, ln),
            None => a.construction_failure("iii.sample"),
        }
        match random_tripotent(fac, n - 1, rng) {
            Some(f) => match complement_tripotent(&e_star, &f) {
                Ok(v) => {
                    a.ge("iv.witness", seminorm_v(x, &v)?, ln);
                    a.le("iv.membership", peirce_defect(0, f.element(), v.element()), t);
                }
                Err(_) => a.construction_failure("iv.witness"),
            },
            None => a.construction_failure("iv.sample"),
        }
    }
    a.add_samples(trials);
    Ok(a.finish())
}

/// Mutually orthogonal minimals `u_1..u_n` of `U2(e)` with `‖x‖_{u_k} ≤ λ_k`,
/// built from the top index down: each `u_k` is a minimax witness inside a
/// rank-`k` tripotent orthogonal to the `u_j` already chosen.
fn kyfan_family(dec: &AtomicDecomposition, e: &Tripotent) -> Result<Vec<Tripotent>> {
    let n = e.rank();
    let mut family = Vec::with_capacity(n);
    let mut current = e.clone();
    for k in (1..=n).rev() {
        let u = minimax_witness(dec, &current, k)?;
        if k > 1 {
            current = complement_tripotent(&current, &u)?;
        }
        family.push(u);
    }
    family.reverse();
    Ok(family)
}

/// Ky Fan maximum principle for `‖·‖_{p,u_1..u_n}`.
///
/// (i) the canonical frame attains `(Σ λ_i^p)^{1/p}`; (ii) random frames of
/// `U2(v_1+…+v_n)` stay between that value and `n^{1/p−1/2}(Σ λ_i²)^{1/2}`;
/// (iii) at `p = 2` all those frames agree; (iv) inside a random rank-`n`
/// tripotent some orthogonal family does not exceed `(Σ λ_i^p)^{1/p}`.
pub fn check_kyfan<R: Rng + ?Sized>(
    x: &Element,
    n: usize,
    p: f64,
    trials: usize,
    rng: &mut R,
) -> Result<CheckResult> {
    if !(p >= 1.0) {
        return Err(Error::BadExponent(p));
    }
    let fac = x.factor();
    let dec = atomic_decompose(x);
    require_atoms(&dec, n)?;
    let lam = &dec.lambdas[..n];
    let target = lam.iter().map(|l| l.powf(p)).sum::<f64>().powf(1.0 / p);
    let l2 = lam.iter().map(|l| l * l).sum::<f64>().sqrt();
    let upper = (n as f64).powf(1.0 / p - 0.5) * l2;
    let e_star = dec.head_tripotent(fac, n);
    let canon = &dec.atoms[..n];
    let mut a = Audit::new("kyfan");
    a.digest_element(x);
    a.digest_u64(n as u64);
    a.digest_f64(p);
    a.record("target", target);
    a.record("upper", upper);
    a.eq("i.canonical", seminorm_p(x, canon, p)?, target, tol::eq(target));
    let mut l2_values = vec![seminorm_p(x, canon, 2.0)?];
    for _ in 0..trials {
        match random_frame_in(&e_star, rng) {
            Some(fr) => {
                let v = seminorm_p(x, &fr.tripotents, p)?;
                a.ge("ii.lower", v, target);
                a.le("ii.upper", v, upper);
                l2_values.push(seminorm_p(x, &fr.tripotents, 2.0)?);
            }
            None => a.construction_failure("ii.frame"),
        }
        match random_tripotent(fac, n, rng).map(|e| kyfan_family(&dec, &e)) {
            Some(Ok(us)) => a.le("iv.family", seminorm_p(x, &us, p)?, target),
            Some(Err(_)) => a.construction_failure("iv.family"),
            None => a.construction_failure("iv.sample"),
        }
    }
    let hi = l2_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = l2_values.iter().cloned().fold(f64::INFINITY, f64::min);
    a.le("iii.spread", hi - lo, tol::EQ);
    a.eq("iii.value", hi, l2, tol::eq(l2));
    a.add_samples(trials + 1);
    Ok(a.finish())
}

fn frames_share_peirce2(f: FactorDescriptor, vs: &Frame, us: &Frame) -> bool {
    let (ev, eu) = (vs.sum(f), us.sum(f));
    let t = tol::eq(1.0);
    peirce_defect(2, ev.element(), eu.element()) <= t && peirce_defect(2, eu.element(), ev.element()) <= t
}

/// `a_ij = ‖v_i‖_{u_j}²` for two frames of the same `U2(e)`.
pub fn stochastic_matrix(vs: &Frame, us: &Frame) -> Result<RMat> {
    let n = vs.len();
    if n == 0 || us.len() != n {
        return Err(Error::FrameMismatch);
    }
    let f = vs.tripotents[0].factor();
    for t in vs.tripotents.iter().chain(&us.tripotents) {
        t.element().same_factor(vs.tripotents[0].element())?;
    }
    if !frames_share_peirce2(f, vs, us) {
        return Err(Error::FrameMismatch);
    }
    let mut m = RMat::zeros(n, n);
    for (i, v) in vs.tripotents.iter().enumerate() {
        for (j, u) in us.tripotents.iter().enumerate() {
            m[(i, j)] = seminorm_v(v.element(), u)?.powi(2);
        }
    }
    Ok(m)
}

/// Row and column sums of [`stochastic_matrix`] are 1 and entries nonnegative.
pub fn check_doubly_stochastic(vs: &Frame, us: &Frame) -> Result<CheckResult> {
    let m = stochastic_matrix(vs, us)?;
    let mut a = Audit::new("doubly_stochastic");
    for t in vs.tripotents.iter().chain(&us.tripotents) {
        a.digest_element(t.element());
    }
    for i in 0..m.nrows() {
        a.eq("row_sum", m.row(i).sum(), 1.0, tol::INEQ);
        a.eq("col_sum", m.column(i).sum(), 1.0, tol::INEQ);
    }
    a.ge("min_entry", m.min(), 0.0);
    a.add_samples(1);
    Ok(a.finish())
}
