//! Executable checkers for the inequalities of the minimax theory and its
//! perturbation bounds. Each returns a [`CheckResult`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::factor::Element;
use crate::tol;

mod continuity;
mod minimax;
mod perturbation;
mod spectra;

pub use continuity::{check_spectral_continuity, continuity_delta, PerturbationTrial};
pub use minimax::{check_doubly_stochastic, check_kyfan, check_minimax, stochastic_matrix};
pub use perturbation::{
    check_peirce_continuity, check_tripotent_distance, davis_pair, support_bound, support_bound_b,
    support_perturbation_bound,
};
pub use spectra::{check_distance_to_rank, check_interlacing, check_weyl};

/// Outcome of one theorem check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub inputs_digest: String,
    pub measured: BTreeMap<String, f64>,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    pub samples: usize,
}

/// Accumulates sub-checks. The reported margin is the worst `bound − measured`
/// over all sub-checks; `bound` is the bound of that binding sub-check.
pub(crate) struct Audit {
    name: String,
    hasher: Sha256,
    measured: BTreeMap<String, f64>,
    worst: BTreeMap<String, f64>,
    margin: f64,
    bound: f64,
    samples: usize,
    failures: usize,
    slack: f64,
}

impl Audit {
    pub fn new(name: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(name.as_bytes());
        Audit {
            name: name.to_string(),
            hasher,
            measured: BTreeMap::new(),
            worst: BTreeMap::new(),
            margin: f64::INFINITY,
            bound: 0.0,
            samples: 0,
            failures: 0,
            slack: tol::INEQ,
        }
    }

    pub fn digest_element(&mut self, x: &Element) {
        self.hasher.update(x.factor().to_string().as_bytes());
        for z in x.data().iter() {
            self.hasher.update(z.re.to_le_bytes());
            self.hasher.update(z.im.to_le_bytes());
        }
    }

    pub fn digest_f64(&mut self, v: f64) {
        self.hasher.update(v.to_le_bytes());
    }

    pub fn digest_u64(&mut self, v: u64) {
        self.hasher.update(v.to_le_bytes());
    }

    /// Record an informational value (no pass/fail semantics).
    pub fn record(&mut self, key: &str, value: f64) {
        self.measured.insert(key.to_string(), value);
    }

    /// Sub-check `measured ≤ bound`. Per key, the worst instance is kept.
    pub fn le(&mut self, key: &str, measured: f64, bound: f64) {
        let m = bound - measured;
        let m = if m.is_nan() { f64::NEG_INFINITY } else { m };
        let prev = self.worst.get(key).copied().unwrap_or(f64::INFINITY);
        if m < prev || !self.worst.contains_key(key) {
            self.worst.insert(key.to_string(), m);
            self.measured.insert(key.to_string(), measured);
            self.measured.insert(format!("{key}.bound"), bound);
            self.measured.insert(format!("{key}.margin"), m);
        }
        if m < self.margin {
            self.margin = m;
            self.bound = bound;
        }
    }

    /// Sub-check `measured ≥ bound`, stored as `−measured ≤ −bound`.
    pub fn ge(&mut self, key: &str, measured: f64, bound: f64) {
        let m = measured - bound;
        let m = if m.is_nan() { f64::NEG_INFINITY } else { m };
        let prev = self.worst.get(key).copied().unwrap_or(f64::INFINITY);
        if m < prev || !self.worst.contains_key(key) {
            self.worst.insert(key.to_string(), m);
            self.measured.insert(key.to_string(), measured);
            self.measured.insert(format!("{key}.bound"), bound);
            self.measured.insert(format!("{key}.margin"), m);
        }
        if m < self.margin {
            self.margin = m;
            self.bound = bound;
        }
    }

    /// Equality sub-check: `|a − b| ≤ tol`.
    pub fn eq(&mut self, key: &str, a: f64, b: f64, tolerance: f64) {
        self.le(key, (a - b).abs(), tolerance);
    }

    /// A constructive step failed; the check cannot pass.
    pub fn construction_failure(&mut self, what: &str) {
        self.failures += 1;
        *self.measured.entry("construction_failures".to_string()).or_insert(0.0) += 1.0;
        let key = format!("construction_failure.{what}");
        *self.measured.entry(key).or_insert(0.0) += 1.0;
    }

    pub fn add_samples(&mut self, n: usize) {
        self.samples += n;
    }

    pub fn finish(self) -> CheckResult {
        let digest = self.hasher.finalize();
        let inputs_digest = digest.iter().map(|b| format!("{b:02x}")).collect();
        let margin = if self.margin.is_finite() { self.margin } else if self.margin > 0.0 { 0.0 } else { f64::MIN };
        let pass = self.failures == 0 && margin >= -self.slack;
        CheckResult {
            name: self.name,
            inputs_digest,
            measured: self.measured,
            bound: self.bound,
            margin,
            pass,
            samples: self.samples,
        }
    }
}

/// Merge per-trial results of one checker into a single summary record.
pub fn merge(name: &str, results: &[CheckResult]) -> CheckResult {
    let mut hasher = Sha256::new();
    let mut measured = BTreeMap::new();
    let mut margin = f64::INFINITY;
    let mut bound = 0.0;
    let mut samples = 0;
    let mut pass = true;
    // Per sub-check, keep the measured/bound pair of the worst trial.
    let mut worst: BTreeMap<&str, (f64, &CheckResult)> = BTreeMap::new();
    for r in results {
        hasher.update(r.inputs_digest.as_bytes());
        samples += r.samples;
        pass &= r.pass;
        if r.margin < margin {
            margin = r.margin;
            bound = r.bound;
        }
        for (k, v) in &r.measured {
            if let Some(base) = k.strip_suffix(".margin") {
                if worst.get(base).is_none_or(|(m, _)| v < m) {
                    worst.insert(base, (*v, r));
                }
            } else if k.starts_with("construction_failure") || k.starts_with("error.") {
                *measured.entry(k.clone()).or_insert(0.0) += *v;
            } else {
                let e = measured.entry(k.clone()).or_insert(*v);
                *e = e.max(*v);
            }
        }
    }
    for (base, (_, r)) in worst {
        for suffix in ["", ".bound", ".margin"] {
            let k = format!("{base}{suffix}");
            measured.insert(k.clone(), r.measured[&k]);
        }
    }
    let digest = hasher.finalize();
    CheckResult {
        name: name.to_string(),
        inputs_digest: digest.iter().map(|b| format!("{b:02x}")).collect(),
        measured,
        bound,
        margin: if margin.is_finite() { margin } else { 0.0 },
        pass,
        samples,
    }
}
