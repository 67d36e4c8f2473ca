use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Audit, CheckResult};
use crate::error::{Error, Result};
use crate::factor::Element;
use crate::random::perturbation;
use crate::spectral::{atomic_decompose, resolution_from, spectral_decompose};
use crate::tol;

const SQRT2: f64 = std::f64::consts::SQRT_2;
/// Fraction of the strict upper limit actually used for δ.
const SAFETY: f64 = 0.9;

/// A perturbation `y` of `x` together with the δ-schedule that admits it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationTrial {
    pub x: Element,
    pub y: Element,
    pub n: usize,
    pub delta: f64,
    pub epsilon_target: f64,
    /// `γ_k = min_{i ≤ k} (σ_i − σ_{i+1})` for `k = 1..n`.
    pub gaps: Vec<f64>,
    /// `h_k(t_k)` for `k = 1..n`, innermost level first.
    pub h_values: Vec<f64>,
}

/// Largest `t` (to relative precision 1e-12) with `g(t) ≤ target`, for `g`
/// increasing with `g(0⁺) = 0`.
fn solve_increasing(g: impl Fn(f64) -> f64, target: f64) -> f64 {
    let mut hi = 1.0;
    while g(hi) <= target {
        hi *= 2.0;
        if hi > 1e12 {
            return hi;
        }
    }
    let mut lo = 0.0;
    for _ in 0..4096 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn distance_bound(h: f64, mult: usize) -> f64 {
    (mult as f64 + 1.0) * h + 2.0 * SQRT2 * h.sqrt()
}

struct Schedule {
    sigmas: Vec<f64>,
    ranks: Vec<usize>,
}

impl Schedule {
    fn sigma(&self, k: usize) -> f64 {
        self.sigmas.get(k - 1).copied().unwrap_or(0.0)
    }

    fn gap(&self, k: usize) -> f64 {
        (1..=k).map(|i| self.sigma(i) - self.sigma(i + 1)).fold(f64::INFINITY, f64::min)
    }

    /// δ for levels `1..=n` and target ε; pushes `h_k(t_k)` innermost first.
    fn delta(&self, n: usize, eps: f64, trail: &mut Vec<f64>) -> f64 {
        let s1 = self.sigma(1);
        if n == 1 {
            let g1 = s1 - self.sigma(2);
            let h = |t: f64| 2.0 * t / s1 + 4.0 * SQRT2 * (t * t + 4.0 * t * s1).sqrt() / (3f64.sqrt() * g1);
            let t1 = solve_increasing(|t| distance_bound(h(t), self.ranks[0]), eps);
            trail.push(h(t1));
            return SAFETY * (g1 / 4.0).min(t1);
        }
        let sn = self.sigma(n);
        let gn = sn - self.sigma(n + 1);
        let h = |t: f64| {
            let u = 6.0 * t * s1;
            7.0 * t * s1 / sn + 4.0 * SQRT2 * (u * u + 4.0 * u * sn * sn).sqrt() / (sn * 3f64.sqrt() * gn)
        };
        let tn = solve_increasing(|t| distance_bound(h(t), self.ranks[n - 1]), eps);
        // The inner levels must keep ‖Σ_{i<n} e_i − Σ_{i<n} f_i‖ ≤ t_n and each
        // ‖e_i − f_i‖ ≤ ε; splitting min(t_n, ε) evenly guarantees both.
        let inner = self.delta(n - 1, tn.min(eps) / (n - 1) as f64, trail);
        trail.push(h(tn));
        SAFETY * (self.gap(n) / 4.0).min(tn * s1).min(6.0 * tn * s1 / sn).min(inner)
    }
}

fn schedule_for(x: &Element, n: usize) -> Result<Schedule> {
    let sd = spectral_decompose(x);
    let s1 = sd.sigmas.first().copied().unwrap_or(0.0);
    if n == 0 || sd.sigmas.len() < n {
        return Err(Error::DegenerateGap(0.0));
    }
    let sched = Schedule { sigmas: sd.sigmas, ranks: sd.multiplicities };
    for k in 1..=n {
        let g = sched.gap(k);
        if g <= tol::GAP * s1 {
            return Err(Error::DegenerateGap(g));
        }
    }
    Ok(sched)
}

/// Constructive δ for the continuity of the first `n` spectral resolutions of
/// `x` at tolerance `epsilon`; the returned trial has `y = x`.
pub fn continuity_delta(x: &Element, n: usize, epsilon: f64) -> Result<PerturbationTrial> {
    let sched = schedule_for(x, n)?;
    let mut h_values = Vec::new();
    let delta = sched.delta(n, epsilon, &mut h_values);
    Ok(PerturbationTrial {
        x: x.clone(),
        y: x.clone(),
        n,
        delta,
        epsilon_target: epsilon,
        gaps: (1..=n).map(|k| sched.gap(k)).collect(),
        h_values,
    })
}

/// Random `y` with `‖x − y‖ ≤ δ` keep every resolution `f_i` within `ε` of
/// `e_i` and of the same rank.
pub fn check_spectral_continuity<R: Rng + ?Sized>(
    x: &Element,
    n: usize,
    epsilon: f64,
    trials: usize,
    rng: &mut R,
) -> Result<CheckResult> {
    let trial = continuity_delta(x, n, epsilon)?;
    let sd = spectral_decompose(x);
    let delta = trial.delta;
    let half = trial.gaps[n - 1] / 2.0;
    let mut a = Audit::new("spectral_continuity");
    a.digest_element(x);
    a.digest_u64(n as u64);
    a.digest_f64(epsilon);
    a.record("delta", delta);
    for t in 0..trials {
        // Every fourth trial sits on the sphere ‖x − y‖ = δ.
        let r = if t % 4 == 0 { delta } else { delta * rng.random::<f64>() };
        let y = x + &perturbation(x.factor(), r, rng);
        let dec = atomic_decompose(&y);
        for i in 0..n {
            // Weyl keeps the matching singular values of y within δ < γ_n/4 of
            // σ_i, so the window σ_i ± γ_n/2 equals σ_i ± δ on this spectrum.
            let s = sd.sigmas[i];
            match resolution_from(&dec, x.factor(), s - half, s + half) {
                Ok(f) => {
                    a.le("resolution_distance", sd.resolutions[i].element().dist(f.element()), epsilon);
                    a.le("rank_change", (f.rank() as f64 - sd.multiplicities[i] as f64).abs(), 0.0);
                }
                Err(_) => a.construction_failure("resolution"),
            }
        }
    }
    a.add_samples(trials);
    Ok(a.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::FactorDescriptor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn diag(f: FactorDescriptor, d: &[f64]) -> Element {
        let (r, c) = f.shape();
        let mut v = vec![0.0; r * c];
        for (i, x) in d.iter().enumerate() {
            v[i * c + i] = *x;
        }
        Element::from_real(f, &v).unwrap()
    }

    #[test]
    fn solver_is_tight() {
        let t = solve_increasing(|t| t * t, 0.25);
        assert!((t - 0.5).abs() < 1e-11);
        assert!(t * t <= 0.25);
    }

    /// Independent evaluation of the first-level schedule for `diag(1, 0)`.
    #[test]
    fn first_level_oracle() {
        let f = FactorDescriptor::Type1 { rows: 2, cols: 2 };
        let trial = continuity_delta(&diag(f, &[1.0, 0.0]), 1, 0.5).unwrap();
        let h = |t: f64| 2.0 * t + 4.0 * 2f64.sqrt() * (t * t + 4.0 * t).sqrt() / 3f64.sqrt();
        let g = |t: f64| 2.0 * h(t) + 2.0 * 2f64.sqrt() * h(t).sqrt();
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if g(m) <= 0.5 { lo = m } else { hi = m }
        }
        let want = 0.9 * lo.min(0.25);
        assert!((trial.delta - want).abs() < 1e-10 * want, "{} vs {want}", trial.delta);
        assert_eq!(trial.gaps, vec![1.0]);
        assert!(trial.delta > 0.0);
    }

    #[test]
    fn schedule_shrinks_with_gap() {
        let f = FactorDescriptor::Type1 { rows: 2, cols: 2 };
        let mut last = f64::INFINITY;
        for g in [0.5, 0.1, 0.01, 0.001] {
            let d = continuity_delta(&diag(f, &[1.0, 1.0 - g]), 1, 0.1).unwrap().delta;
            assert!(d < last);
            last = d;
        }
        assert!(matches!(continuity_delta(&diag(f, &[1.0, 1.0]), 2, 0.1), Err(Error::DegenerateGap(_))));
    }

    #[test]
    fn recursive_schedule() {
        let f = FactorDescriptor::Type1 { rows: 3, cols: 3 };
        let x = diag(f, &[3.0, 2.0, 1.0]);
        let t = continuity_delta(&x, 2, 0.1).unwrap();
        let d1 = continuity_delta(&x, 1, 0.1).unwrap().delta;
        assert!(t.delta > 0.0 && t.delta < 0.25 && t.delta <= d1);
        assert_eq!(t.h_values.len(), 2);
    }

    #[test]
    fn continuity_checks() {
        let f = FactorDescriptor::Type1 { rows: 2, cols: 2 };
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let r = check_spectral_continuity(&diag(f, &[2.0, 1.0]), 1, 0.3, 100, &mut rng).unwrap();
        assert!(r.pass, "{r:?}");
        let g = FactorDescriptor::Type3 { n: 3 };
        let r = check_spectral_continuity(&diag(g, &[1.0, 1.0, 0.3]), 1, 0.1, 30, &mut rng).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
