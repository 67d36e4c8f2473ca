//! Seeded suite runner behind the `lab` binary.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::{self, merge, CheckResult};
use crate::co::{co_continuity, convex_norm_bound, CoSplitter};
use crate::error::{Error, Result};
use crate::factor::{Element, FactorDescriptor};
use crate::linalg::{CMat, RMat, C64};
use crate::peirce::{check_peirce_positivity, project, Tripotent};
use crate::random::{
    element_with_values, gaussian_element, haar_unitary, perturbation, random_element, random_frame_in,
    random_tripotent, substream, RandomModel, Substream,
};
use crate::spectral::atomic_decompose;
use crate::tol;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Pass slack on every margin; defaults to `τ_ineq`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ineq: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub factors: Vec<FactorDescriptor>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub suites: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        for f in &self.factors {
            f.validate()?;
        }
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return Err(Error::Config(format!("unknown suite `{s}`; known: {}", SUITES.join(", "))));
            }
        }
        if let Some(t) = self.tolerances.ineq {
            if !(t >= 0.0) {
                return Err(Error::Config(format!("tolerance must be nonnegative, got {t}")));
            }
        }
        Ok(())
    }
}

/// Factors exercised when none are given.
pub fn default_factors() -> Vec<FactorDescriptor> {
    vec![
        FactorDescriptor::Type1 { rows: 3, cols: 4 },
        FactorDescriptor::Type2 { n: 4 },
        FactorDescriptor::Type3 { n: 3 },
        FactorDescriptor::Spin { dim: 6 },
    ]
}

/// Registered checker names.
pub const SUITES: &[&str] = &[
    "weyl",
    "interlacing",
    "distance_to_rank",
    "minimax",
    "kyfan",
    "doubly_stochastic",
    "peirce_positivity",
    "tripotent_distance",
    "peirce_continuity",
    "davis",
    "support_perturbation",
    "spectral_continuity",
    "convex_norm",
    "co_split",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub master_seed: u64,
    pub trials: usize,
    pub factors: Vec<FactorDescriptor>,
    pub pass: bool,
    /// Per suite, one merged result per applicable factor.
    pub suites: BTreeMap<String, Vec<CheckResult>>,
}

/// Inner sample count for checkers that loop internally.
const INNER: usize = 5;

fn model() -> RandomModel {
    RandomModel::UniformGap { min_gap: 0.1 }
}

fn unit_interval<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}

fn pick<R: Rng + ?Sized>(rng: &mut R, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}

/// Log-uniform radius in `[10^a, 10^b]`.
fn log_radius<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    10f64.powf(a + (b - a) * unit_interval(rng))
}

fn tripotent_of_rank<R: Rng + ?Sized>(f: FactorDescriptor, k: usize, rng: &mut R) -> Result<Tripotent> {
    random_tripotent(f, k, rng).ok_or_else(|| Error::ConstructionFailed(format!("rank-{k} tripotent sampler")))
}

/// A tripotent of the same rank as `e`, at a random small distance from it.
fn nearby_tripotent<R: Rng + ?Sized>(e: &Tripotent, rng: &mut R) -> Result<Tripotent> {
    let f = e.factor();
    let r = log_radius(rng, -4.0, -1.0);
    let z = e.element() + &perturbation(f, r, rng);
    let t = atomic_decompose(&z).head_tripotent(f, e.rank());
    Tripotent::new(t.into_element())
}

/// Norm-one `e + w` with `w ∈ U0(e)` of norm below `1 − gap`.
fn face_element<R: Rng + ?Sized>(e: &Tripotent, rng: &mut R) -> Element {
    let f = e.factor();
    let w = project(0, e.element(), &gaussian_element(f, rng));
    let n = w.norm();
    if n <= tol::EQ {
        return e.element().clone();
    }
    let target = 0.05 + 0.8 * unit_interval(rng);
    e.element() + &w.scale_re(target / n)
}

/// Element with `k` singular values equal to 1 and the rest in `[0, 0.85]`.
fn norm_one_element<R: Rng + ?Sized>(f: FactorDescriptor, rng: &mut R) -> Element {
    let r = f.rank();
    let k = pick(rng, 1, r);
    let mut vals = vec![1.0; k];
    let mut tail: Vec<f64> = (k..r).map(|_| 0.85 * unit_interval(rng)).collect();
    tail.sort_by(|a, b| b.total_cmp(a));
    vals.extend(tail);
    element_with_values(f, &vals, rng)
}

/// Element of the closed unit ball with norm drawn from `[0.3, 1]`.
fn ball_element<R: Rng + ?Sized>(f: FactorDescriptor, rng: &mut R) -> Element {
    let x = gaussian_element(f, rng);
    let t = if rng.random::<f64>() < 0.25 { 1.0 } else { 0.3 + 0.7 * unit_interval(rng) };
    x.scale_re(t / x.norm())
}

/// Selfadjoint element of a JB*-algebra factor with the given eigenvalues.
fn selfadjoint_with<R: Rng + ?Sized>(f: FactorDescriptor, eig: &[f64], rng: &mut R) -> Option<Element> {
    let n = eig.len();
    let d = CMat::from_fn(n, n, |i, j| if i == j { C64::new(eig[i], 0.0) } else { C64::new(0.0, 0.0) });
    let u = match f {
        FactorDescriptor::Type3 { .. } => {
            let g = RMat::from_fn(n, n, |_, _| rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng));
            g.qr().q().map(|t| C64::new(t, 0.0))
        }
        FactorDescriptor::Type1 { rows, cols } if rows == cols => haar_unitary(n, rng),
        _ => return None,
    };
    let m = &u * d * u.adjoint();
    let m = match f {
        FactorDescriptor::Type3 { .. } => m.map(|z| C64::new(z.re, 0.0)),
        _ => m,
    };
    Element::new(f, (&m + m.adjoint()) * C64::new(0.5, 0.0)).ok()
}

fn davis_trial<R: Rng + ?Sized>(f: FactorDescriptor, rng: &mut R) -> Option<Result<CheckResult>> {
    let n = f.shape().0;
    let mut eig: Vec<f64> = (0..n).map(|_| 2.0 * unit_interval(rng) - 1.0).collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    let i = pick(rng, 0, n - 1);
    let j = pick(rng, i, (i + 1).min(n - 1));
    let below = if i > 0 { eig[i] - eig[i - 1] } else { 1.0 };
    let above = if j + 1 < n { eig[j + 1] - eig[j] } else { 1.0 };
    // Keep the window edges off the spectrum so roundoff cannot land inside the margin.
    let (nu, mu) = (eig[i] - below / 4.0, eig[j] + above / 4.0);
    let gamma = 0.7 * below.min(above);
    let a = selfadjoint_with(f, &eig, rng)?;
    let r = 0.499 * gamma * unit_interval(rng);
    let noise: Vec<f64> = (0..n).map(|_| 2.0 * unit_interval(rng) - 1.0).collect();
    let s = noise.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let noise: Vec<f64> = noise.iter().map(|v| v * r / s).collect();
    let b = &a + &selfadjoint_with(f, &noise, rng)?;
    Some(checks::davis_pair(&a, &b, nu, mu, gamma))
}

fn co_trial<R: Rng + ?Sized>(f: FactorDescriptor, index: u64, rng: &mut R) -> Result<CheckResult> {
    let n = pick(rng, 2, 3);
    let mut lams: Vec<f64> = (0..n).map(|_| 0.2 + unit_interval(rng)).collect();
    let s: f64 = lams.iter().sum();
    lams.iter_mut().for_each(|l| *l /= s);
    let xs: Vec<Element> = if index.is_multiple_of(2) {
        let e = tripotent_of_rank(f, pick(rng, 1, f.rank()), rng)?;
        (0..n).map(|_| face_element(&e, rng)).collect()
    } else {
        (0..n).map(|_| ball_element(f, rng)).collect()
    };
    let eps = 0.05 + 0.25 * unit_interval(rng);
    let sp = CoSplitter::new(&xs, &lams, eps)?;
    let mut ys = Vec::new();
    for _ in 0..2 {
        // (1 − r)x₀ + p with ‖p‖ = r stays in the ball and within 2r of x₀.
        let r = 0.45 * sp.delta() * unit_interval(rng);
        ys.push(&sp.center().scale_re(1.0 - r) + &perturbation(f, r, rng));
    }
    let s0 = sp.split(&ys[0])?;
    let s1 = sp.split(&ys[1])?;
    Ok(merge("co_split", &[s0.check(), s1.check(), co_continuity(&s0, &s1)?]))
}

/// One randomized trial of `suite` on factor `f`; `None` when the suite does
/// not apply to the factor.
pub fn run_trial(suite: &str, f: FactorDescriptor, index: u64, rng: &mut Substream) -> Option<Result<CheckResult>> {
    let r = f.rank();
    let out = match suite {
        "weyl" => (|| {
            let x = random_element(f, model(), rng)?;
            let y = if index.is_multiple_of(2) {
                &x + &perturbation(f, log_radius(rng, -3.0, 0.0), rng)
            } else {
                random_element(f, model(), rng)?
            };
            checks::check_weyl(&x, &y)
        })(),
        "interlacing" => (|| {
            let x = random_element(f, model(), rng)?;
            let e = tripotent_of_rank(f, pick(rng, 0, r), rng)?;
            checks::check_interlacing(&x, &e)
        })(),
        "distance_to_rank" => (|| {
            let x = random_element(f, model(), rng)?;
            checks::check_distance_to_rank(&x, pick(rng, 1, r), 2 * INNER, rng)
        })(),
        "minimax" => (|| {
            let x = random_element(f, model(), rng)?;
            checks::check_minimax(&x, pick(rng, 1, r), INNER, rng)
        })(),
        "kyfan" => (|| {
            let x = random_element(f, model(), rng)?;
            let p = [1.0, 1.5, 2.0][pick(rng, 0, 2)];
            checks::check_kyfan(&x, pick(rng, 1, r), p, INNER, rng)
        })(),
        "doubly_stochastic" => (|| {
            let e = tripotent_of_rank(f, pick(rng, 1, r), rng)?;
            let frame = |rng: &mut Substream| {
                random_frame_in(&e, rng).ok_or_else(|| Error::ConstructionFailed("frame sampler".into()))
            };
            let (vs, us) = (frame(rng)?, frame(rng)?);
            checks::check_doubly_stochastic(&vs, &us)
        })(),
        "peirce_positivity" => (|| {
            let e = tripotent_of_rank(f, pick(rng, 1, r), rng)?;
            check_peirce_positivity(&e, &gaussian_element(f, rng))
        })(),
        "tripotent_distance" => (|| {
            let e = tripotent_of_rank(f, pick(rng, 1, r), rng)?;
            let g = if index.is_multiple_of(2) { nearby_tripotent(&e, rng)? } else { tripotent_of_rank(f, pick(rng, 1, r), rng)? };
            checks::check_tripotent_distance(&e, &g)
        })(),
        "peirce_continuity" => (|| {
            let e = tripotent_of_rank(f, pick(rng, 1, r), rng)?;
            let g = if index.is_multiple_of(2) { nearby_tripotent(&e, rng)? } else { tripotent_of_rank(f, e.rank(), rng)? };
            let x = face_element(&e, rng);
            checks::check_peirce_continuity(&e, &g, Some(&x))
        })(),
        "davis" => return davis_trial(f, rng),
        "support_perturbation" => (|| {
            let x = norm_one_element(f, rng);
            let e = crate::spectral::support_tripotent(&x, true)?;
            let gamma = 1.0 - x.dist(e.element());
            let y = &x + &perturbation(f, 0.999 * gamma / 4.0 * unit_interval(rng), rng);
            checks::support_perturbation_bound(&x, &y)
        })(),
        "spectral_continuity" => (|| {
            let x = random_element(f, model(), rng)?;
            checks::check_spectral_continuity(&x, pick(rng, 1, r.min(3)), 0.1, 2 * INNER, rng)
        })(),
        "convex_norm" => {
            let (x, y) = (ball_element(f, rng), ball_element(f, rng));
            convex_norm_bound(&x, &y, 0.5 * unit_interval(rng))
        },
        "co_split" => co_trial(f, index, rng),
        _ => return None,
    };
    Some(out)
}

/// Failed record standing in for a trial whose construction errored.
fn error_result(suite: &str, e: &Error) -> CheckResult {
    let kind = format!("{e:?}");
    let kind = kind.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
    let mut measured = BTreeMap::new();
    measured.insert(format!("error.{kind}"), 1.0);
    CheckResult {
        name: suite.to_string(),
        inputs_digest: String::new(),
        measured,
        bound: 0.0,
        margin: f64::MIN,
        pass: false,
        samples: 0,
    }
}

/// Re-judge a result under a different slack.
fn rejudge(mut r: CheckResult, slack: f64) -> CheckResult {
    let broken = r.measured.keys().any(|k| k.starts_with("construction_failure") || k.starts_with("error."));
    r.pass = !broken && r.margin >= -slack;
    r
}

/// All trials of one suite on one factor, merged in trial order.
pub fn run_suite_on(suite: &str, f: FactorDescriptor, trials: usize, seed: u64, slack: Option<f64>) -> Option<CheckResult> {
    let key = format!("{suite}:{f}");
    let results: Vec<Option<CheckResult>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, &key, i);
            run_trial(suite, f, i, &mut rng).map(|r| {
                let r = r.unwrap_or_else(|e| error_result(suite, &e));
                match slack {
                    Some(s) => rejudge(r, s),
                    None => r,
                }
            })
        })
        .collect();
    let results: Vec<CheckResult> = results.into_iter().flatten().collect();
    (!results.is_empty()).then(|| merge(&format!("{suite}[{f}]"), &results))
}

pub fn run_suite(config: &TrialConfig) -> Result<Report> {
    config.validate()?;
    let factors = if config.factors.is_empty() { default_factors() } else { config.factors.clone() };
    let mut suites = BTreeMap::new();
    for s in &config.suites {
        let per_factor: Vec<CheckResult> = factors
            .iter()
            .filter_map(|f| run_suite_on(s, *f, config.trials, config.master_seed, config.tolerances.ineq))
            .collect();
        suites.insert(s.clone(), per_factor);
    }
    let pass = suites.values().flatten().all(|r| r.pass);
    Ok(Report { master_seed: config.master_seed, trials: config.trials, factors, pass, suites })
}

/// Expand `all` and comma-separated lists into registered suite names.
pub fn parse_suites(spec: &str) -> Vec<String> {
    let mut out = Vec::new();
    for s in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if s == "all" {
            out.extend(SUITES.iter().map(|s| s.to_string()));
        } else {
            out.push(s.to_string());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(suites: &[&str], trials: usize) -> TrialConfig {
        TrialConfig {
            factors: vec![],
            trials,
            master_seed: 7,
            tolerances: Tolerances::default(),
            suites: suites.iter().map(|s| s.to_string()).collect(),
            output: None,
        }
    }

    #[test]
    fn empty_suite_list() {
        let r = run_suite(&cfg(&[], 1)).unwrap();
        assert!(r.pass && r.suites.is_empty());
    }

    #[test]
    fn config_validation() {
        assert!(matches!(run_suite(&cfg(&["nope"], 1)), Err(Error::Config(_))));
        assert!(matches!(run_suite(&cfg(&["weyl"], 0)), Err(Error::Config(_))));
        let c: TrialConfig = serde_json::from_str(
            r#"{"factors":[{"kind":"spin","dim":4}],"trials":2,"master_seed":1,"suites":["weyl"]}"#,
        )
        .unwrap();
        assert_eq!(c.factors, vec![FactorDescriptor::Spin { dim: 4 }]);
    }

    #[test]
    fn every_suite_runs() {
        for s in SUITES {
            let r = run_suite(&cfg(&[s], 3)).unwrap();
            for res in &r.suites[*s] {
                assert!(res.pass, "{s}: {res:?}");
            }
        }
    }

    #[test]
    fn deterministic() {
        let a = serde_json::to_string(&run_suite(&cfg(&["weyl", "minimax"], 4)).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(&cfg(&["weyl", "minimax"], 4)).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn suite_spec_parsing() {
        assert_eq!(parse_suites("weyl, kyfan"), vec!["weyl", "kyfan"]);
        assert_eq!(parse_suites("all").len(), SUITES.len());
    }
}
