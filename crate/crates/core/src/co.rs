//! Norm control of convex combinations, common support tripotents and the
//! constructive splitter `y ↦ (x̃_1, …, x̃_n)` with `y = Σ λ_j x̃_j`.

use serde::{Deserialize, Serialize};

use crate::checks::{support_bound, Audit, CheckResult};
use crate::error::{Error, Result};
use crate::factor::{Element, FactorDescriptor};
use crate::peirce::{p0, p2, Tripotent};
use crate::spectral::{atomic_decompose, resolution_from, support_tripotent};
use crate::tol;

const SAFETY: f64 = 0.9;

fn require_ball(x: &Element) -> Result<()> {
    let n = x.norm();
    if n > 1.0 + tol::EQ {
        return Err(Error::OutOfBall(n));
    }
    Ok(())
}

fn combination(f: FactorDescriptor, xs: &[Element], w: &[f64]) -> Element {
    xs.iter().zip(w).fold(Element::zero(f), |acc, (x, l)| &acc + &x.scale_re(*l))
}

/// `‖λx + (1−λ)y‖` against `min(√((1−λ)(1−λ(2−d²))), 1 − (4−d²)λ/4)`.
///
/// The textbook form `√(1 − (4−d²)(λ−λ²))` is recorded as `stated_sqrt` but
/// not enforced: it fails for `x = E11`, `y = E22`, `λ = 1/4`.
pub fn convex_norm_bound(x: &Element, y: &Element, lam: f64) -> Result<CheckResult> {
    x.same_factor(y)?;
    require_ball(x)?;
    require_ball(y)?;
    if !(0.0..=0.5).contains(&lam) {
        return Err(Error::Config(format!("λ must lie in [0, 1/2], got {lam}")));
    }
    let d = (x + y).norm().min(2.0);
    let measured = (&x.scale_re(lam) + &y.scale_re(1.0 - lam)).norm();
    let k = 4.0 - d * d;
    let sharp = ((1.0 - lam) * (1.0 - lam * (2.0 - d * d))).max(0.0).sqrt();
    let linear = 1.0 - k * lam / 4.0;
    let mut a = Audit::new("convex_norm_bound");
    a.digest_element(x);
    a.digest_element(y);
    a.digest_f64(lam);
    a.record("d", d);
    a.record("stated_sqrt", (1.0 - k * (lam - lam * lam)).max(0.0).sqrt());
    a.record("sharp_sqrt", sharp);
    a.record("linear", linear);
    a.le("norm", measured, sharp.min(linear));
    a.add_samples(1);
    Ok(a.finish())
}

/// Support tripotent shared by every strict convex combination of `xs`.
pub fn common_support(xs: &[Element], probes: &[Vec<f64>]) -> Result<Tripotent> {
    let first = xs.first().ok_or_else(|| Error::Config("no inputs".into()))?;
    let f = first.factor();
    for x in xs {
        x.same_factor(first)?;
        require_ball(x)?;
    }
    let n = xs.len();
    let uniform = vec![1.0 / n as f64; n];
    let e = support_tripotent(&combination(f, xs, &uniform), false)?;
    for w in probes {
        validate_weights(w, n)?;
        let z = combination(f, xs, w);
        let rest = p0(e.element(), &z);
        let defect = z.dist(&(e.element() + &rest));
        if defect > tol::eq(1.0) {
            return Err(Error::MembershipViolation { defect, tolerance: tol::eq(1.0) });
        }
        if !e.is_zero() && rest.norm() >= 1.0 {
            return Err(Error::MembershipViolation { defect: rest.norm(), tolerance: 1.0 });
        }
    }
    Ok(e)
}

fn validate_weights(w: &[f64], n: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::ShapeMismatch { expected: format!("{n} weights"), got: format!("{}", w.len()) });
    }
    if w.iter().any(|l| !(*l > 0.0)) || (w.iter().sum::<f64>() - 1.0).abs() > tol::EQ {
        return Err(Error::Config(format!("weights must be positive and sum to 1: {w:?}")));
    }
    Ok(())
}

/// Intermediate quantities of the construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoAudit {
    pub e: Element,
    pub f: Element,
    pub rank_e: usize,
    pub gamma: f64,
    pub d: f64,
    pub c: f64,
    pub mu: Vec<f64>,
    pub a: Vec<Element>,
    pub epsilon1: f64,
    pub delta_limit: f64,
}

/// One evaluation of the splitter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoSplit {
    pub inputs: Vec<Element>,
    pub weights: Vec<f64>,
    pub y: Element,
    pub epsilon: f64,
    pub delta_used: f64,
    pub outputs: Vec<Element>,
    pub audit: CoAudit,
}

/// The part of the construction that depends only on `(x_j, λ_j, ε)`.
#[derive(Clone, Debug)]
pub struct CoSplitter {
    xs: Vec<Element>,
    lams: Vec<f64>,
    epsilon: f64,
    x0: Element,
    e: Tripotent,
    gamma: f64,
    d: f64,
    c: f64,
    mu: Vec<f64>,
    a: Vec<Element>,
    delta: f64,
    delta_limit: f64,
}

/// Largest `t` with `g(t) ≤ target` for increasing `g` with `g(0) = 0`.
fn solve_increasing(g: impl Fn(f64) -> f64, target: f64) -> f64 {
    let mut hi = 1.0;
    while g(hi) <= target && hi < 1e6 {
        hi *= 2.0;
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

impl CoSplitter {
    pub fn new(xs: &[Element], lams: &[f64], epsilon: f64) -> Result<Self> {
        let n = xs.len();
        let first = xs.first().ok_or_else(|| Error::Config("no inputs".into()))?;
        let fac = first.factor();
        validate_weights(lams, n)?;
        if !(epsilon > 0.0) {
            return Err(Error::Config(format!("ε must be positive, got {epsilon}")));
        }
        let x0 = combination(fac, xs, lams);
        let e = common_support(xs, &[lams.to_vec()])?;
        let c = epsilon / 4.0 * lams.iter().cloned().fold(f64::INFINITY, f64::min);
        let mu: Vec<f64> = lams.iter().map(|l| c / l).collect();
        let a: Vec<Element> = if n == 1 {
            xs.to_vec()
        } else {
            (0..n)
                .map(|j| {
                    let others: Vec<f64> = (0..n).map(|i| if i == j { 0.0 } else { 1.0 / (n - 1) as f64 }).collect();
                    combination(fac, xs, &others)
                })
                .collect()
        };
        let d = (0..n).map(|j| p0(e.element(), &(&a[j] + &xs[j])).norm()).fold(0.0, f64::max);
        let gamma = 1.0 - p0(e.element(), &x0).norm();
        let min_lam = lams.iter().cloned().fold(f64::INFINITY, f64::min);
        let (delta_limit, delta) = if n == 1 {
            (epsilon, epsilon)
        } else if e.is_zero() {
            let lim = (gamma / 4.0)
                .min(epsilon / 2.0)
                .min(mu.iter().map(|m| (4.0 - d * d) * m / 4.0).fold(f64::INFINITY, f64::min));
            (lim, SAFETY * lim)
        } else {
            if gamma <= tol::GAP {
                return Err(Error::DegenerateGap(gamma));
            }
            let m = e.rank();
            let eps1 = |t: f64| support_bound(t, gamma, m);
            let lim = (gamma / 4.0)
                .min(solve_increasing(|t| 8.0 * eps1(t) + t, min_lam * (4.0 - d * d) / 4.0))
                .min(solve_increasing(|t| 18.0 * eps1(t) + 2.0 * t, epsilon / 2.0));
            (lim, SAFETY * lim)
        };
        Ok(CoSplitter { xs: xs.to_vec(), lams: lams.to_vec(), epsilon, x0, e, gamma, d, c, mu, a, delta, delta_limit })
    }

    /// Admissible radius around `Σ λ_j x_j`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn center(&self) -> &Element {
        &self.x0
    }

    pub fn support(&self) -> &Tripotent {
        &self.e
    }

    /// Resolution of `y` at the top singular value, on `[1 − γ/2, 1 + γ/2]`.
    fn top_resolution(&self, y: &Element) -> Result<Tripotent> {
        if self.e.is_zero() {
            return Ok(Tripotent::zero(y.factor()));
        }
        // Singular values of y near 1 lie in [1 − δ, 1]; the others stay below
        // 1 − γ + δ < 1 − γ/2, so this window matches [1 − δ, 1].
        let dec = atomic_decompose(y);
        resolution_from(&dec, y.factor(), 1.0 - self.gamma / 2.0, 1.0 + self.gamma / 2.0)
    }

    pub fn split(&self, y: &Element) -> Result<CoSplit> {
        y.same_factor(&self.x0)?;
        require_ball(y)?;
        // δ can sit below the rounding error of the distance itself.
        let dist = y.dist(&self.x0);
        if dist > self.delta + 16.0 * f64::EPSILON * self.x0.norm().max(1.0) {
            return Err(Error::DeltaExceeded { distance: dist, delta: self.delta });
        }
        let fac = y.factor();
        let (outputs, f) = if self.xs.len() == 1 {
            (vec![y.clone()], Tripotent::zero(fac))
        } else {
            let f = self.top_resolution(y)?;
            let fe = f.element();
            let head = p2(fe, y);
            let shift = y - &self.x0;
            let outs = (0..self.xs.len())
                .map(|j| {
                    let xj = &self.xs[j];
                    let inner = &(xj + &(&self.a[j] - xj).scale_re(self.mu[j])) + &shift;
                    &head + &p0(fe, &inner)
                })
                .collect();
            (outs, f)
        };
        Ok(CoSplit {
            inputs: self.xs.clone(),
            weights: self.lams.clone(),
            y: y.clone(),
            epsilon: self.epsilon,
            delta_used: self.delta,
            outputs,
            audit: CoAudit {
                e: self.e.element().clone(),
                f: f.element().clone(),
                rank_e: self.e.rank(),
                gamma: self.gamma,
                d: self.d,
                c: self.c,
                mu: self.mu.clone(),
                a: self.a.clone(),
                epsilon1: if self.e.is_zero() { 0.0 } else { support_bound(self.delta, self.gamma, self.e.rank()) },
                delta_limit: self.delta_limit,
            },
        })
    }
}

/// Split `y` against the inputs; δ is computed from the inputs and `epsilon`.
pub fn co_split(xs: &[Element], lams: &[f64], y: &Element, epsilon: f64) -> Result<CoSplit> {
    CoSplitter::new(xs, lams, epsilon)?.split(y)
}

impl CoSplit {
    /// Recombination, ball preservation and ε-proximity.
    pub fn check(&self) -> CheckResult {
        let fac = self.y.factor();
        let mut a = Audit::new("co_split");
        for x in self.inputs.iter().chain([&self.y]) {
            a.digest_element(x);
        }
        a.digest_f64(self.epsilon);
        let back = combination(fac, &self.outputs, &self.weights);
        a.le("recombination", back.dist(&self.y), tol::eq(self.y.norm()));
        for (x, xt) in self.inputs.iter().zip(&self.outputs) {
            a.le("ball", xt.norm(), 1.0);
            a.le("proximity", x.dist(xt), self.epsilon);
        }
        a.record("delta_used", self.delta_used);
        a.record("gamma", self.audit.gamma);
        a.record("d", self.audit.d);
        a.add_samples(1);
        a.finish()
    }
}

/// `‖x̃_j(y) − x̃_j(y′)‖ ≤ ‖y − y′‖ + 16‖f_y − f_{y′}‖` for two splits of the
/// same inputs.
pub fn co_continuity(s: &CoSplit, t: &CoSplit) -> Result<CheckResult> {
    if s.inputs != t.inputs || s.weights != t.weights {
        return Err(Error::Config("splits of different inputs".into()));
    }
    let dy = s.y.dist(&t.y);
    let df = s.audit.f.dist(&t.audit.f);
    let mut a = Audit::new("co_continuity");
    a.digest_element(&s.y);
    a.digest_element(&t.y);
    for (u, v) in s.outputs.iter().zip(&t.outputs) {
        a.le("output_shift", u.dist(v), dy + 16.0 * df);
    }
    a.record("f_shift", df);
    a.add_samples(1);
    Ok(a.finish())
}
