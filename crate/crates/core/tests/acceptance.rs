//! Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.

use std::process::{Command, ExitCode};
use std::time::Instant;

use jtlab::checks::{
    check_doubly_stochastic, check_kyfan, check_minimax, check_spectral_continuity, check_weyl, CheckResult,
};
use jtlab::co::{co_split, CoSplitter};
use jtlab::factor::Element;
use jtlab::lab::run_suite_on;
use jtlab::linalg::{CVec, RMat, C64};
use jtlab::peirce::{is_tripotent, Tripotent};
use jtlab::random::{random_element, random_frame_in, random_tripotent, substream, RandomModel};
use jtlab::spectral::{atomic_decompose, seminorm_v};
use jtlab::FactorDescriptor;
use nalgebra::SymmetricEigen;
use rand::Rng;

const SEED: u64 = 0x6163_6365_7074;

const ORACLE_REL: f64 = 1e-8;
const SVD_REL: f64 = 1e-9;
const ORACLE_SECONDS: f64 = 10.0;
const EXAMPLE_ABS: f64 = 1e-12;
const WEYL_SLACK: f64 = 1e-8;
const WEYL_EQUALITY: f64 = 1e-9;
const KYFAN_CANONICAL: f64 = 1e-8;
const KYFAN_SPREAD: f64 = 1e-9;
const STOCHASTIC: f64 = 1e-8;
const PERTURBATION_SLACK: f64 = 1e-8;
const CONTINUITY_EPS: f64 = 0.1;
const RECOMBINATION: f64 = 1e-9;
const BALL: f64 = 1e-8;
const PROXIMITY: f64 = 1e-8;

fn factors() -> Vec<FactorDescriptor> {
    vec![
        FactorDescriptor::Type1 { rows: 3, cols: 4 },
        FactorDescriptor::Type2 { n: 4 },
        FactorDescriptor::Type3 { n: 3 },
        FactorDescriptor::Spin { dim: 6 },
    ]
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn margin_of(r: &CheckResult, key: &str) -> f64 {
    r.measured.get(&format!("{key}.margin")).copied().unwrap_or(f64::NEG_INFINITY)
}

fn no_failures(r: &CheckResult) -> bool {
    !r.measured.keys().any(|k| k.starts_with("construction_failure") || k.starts_with("error."))
}

/// Nonzero spectrum of `L(x, x)` on the span of the odd powers of `x`, by
/// Arnoldi iteration in Hilbert-Schmidt coordinates.
fn krylov_spectrum(x: &Element) -> Vec<f64> {
    let f = x.factor();
    let l = |q: &CVec| Element::triple(x, x, &Element::from_coords(f, q)).coords();
    let scale = x.norm().powi(2);
    let mut qs: Vec<CVec> = Vec::new();
    let mut w = x.coords();
    loop {
        for _ in 0..2 {
            for q in &qs {
                let c = q.dotc(&w);
                w -= q * c;
            }
        }
        let n = w.norm();
        if n <= 1e-9 * scale.max(1e-300) || qs.len() == f.complex_dim() {
            break;
        }
        let q = w / C64::new(n, 0.0);
        w = l(&q);
        qs.push(q);
        w *= C64::new(1.0 / scale, 0.0);
    }
    let k = qs.len();
    let lq: Vec<CVec> = qs.iter().map(l).collect();
    let mut h = RMat::zeros(2 * k, 2 * k);
    for i in 0..k {
        for j in 0..k {
            let z = qs[i].dotc(&lq[j]);
            h[(i, j)] = z.re;
            h[(i + k, j + k)] = z.re;
            h[(i, j + k)] = -z.im;
            h[(i + k, j)] = z.im;
        }
    }
    let h = (&h + h.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev.into_iter().step_by(2).filter(|&v| v > 1e-12 * scale).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut worst_svd: f64 = 0.0;
    let mut count_mismatch = 0;
    for (fi, f) in factors().into_iter().enumerate() {
        for i in 0..125u64 {
            let mut rng = substream(SEED, &format!("oracle:{fi}"), i);
            let x = random_element(f, RandomModel::UniformGap { min_gap: 0.05 }, &mut rng).unwrap();
            let mut sq: Vec<f64> = atomic_decompose(&x).lambdas.iter().map(|l| l * l).collect();
            sq.sort_by(|a, b| b.total_cmp(a));
            let ks = krylov_spectrum(&x);
            if ks.len() != sq.len() {
                count_mismatch += 1;
                continue;
            }
            for (a, b) in sq.iter().zip(&ks) {
                worst = worst.max((a - b).abs() / b);
            }
            if let FactorDescriptor::Type1 { .. } = f {
                let mut s: Vec<f64> = x.data().singular_values().iter().copied().collect();
                s.sort_by(|a, b| b.total_cmp(a));
                for (a, b) in atomic_decompose(&x).lambdas.iter().zip(&s) {
                    worst_svd = worst_svd.max((a - b).abs() / b);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        count_mismatch == 0 && worst <= ORACLE_REL && worst_svd <= SVD_REL && secs < ORACLE_SECONDS,
        format!("500 elements, L(x,x) rel err {worst:.2e}, SVD rel err {worst_svd:.2e}, count mismatches {count_mismatch}, {secs:.2}s"),
    )
}

fn criterion_2() -> Outcome {
    let f = FactorDescriptor::Type1 { rows: 2, cols: 2 };
    let (a, b, d) = (0.5, 0.5, 0.5);
    let m = Element::from_real(f, &[a, b, b, d]).unwrap();
    let u1 = Tripotent::new(Element::from_real(f, &[1.0, 0.0, 0.0, 0.0]).unwrap()).unwrap();
    let u2 = Tripotent::new(Element::from_real(f, &[0.0, 0.0, 0.0, 1.0]).unwrap()).unwrap();
    let sum = seminorm_v(&m, &u1).unwrap() + seminorm_v(&m, &u2).unwrap();
    let lam = atomic_decompose(&m).lambdas;
    let lsum: f64 = lam.iter().sum();
    let minimal = Tripotent::new(m.clone()).map(|t| t.is_minimal()).unwrap_or(false);
    outcome(
        (sum - 2f64.sqrt()).abs() <= EXAMPLE_ABS && (lsum - 1.0).abs() <= EXAMPLE_ABS && sum > lsum && is_tripotent(&m) && minimal,
        format!("|A|_u1+|A|_u2 = {sum:.15}, l1+l2 = {lsum:.15}, minimal tripotent {minimal}"),
    )
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for f in factors() {
        let r = run_suite_on("weyl", f, 1000, SEED, Some(WEYL_SLACK)).unwrap();
        ok &= r.pass && no_failures(&r) && r.samples == 1000;
        worst = worst.min(r.margin);
    }
    let f = FactorDescriptor::Type1 { rows: 3, cols: 3 };
    let diag = |d: [f64; 3]| Element::from_real(f, &[d[0], 0.0, 0.0, 0.0, d[1], 0.0, 0.0, 0.0, d[2]]).unwrap();
    let eq = check_weyl(&diag([3.0, 2.0, 1.0]), &diag([3.5, 2.0, 1.0])).unwrap();
    let gap = eq.measured["sup_gap"] - eq.measured["sup_gap.bound"];
    ok &= (-WEYL_EQUALITY..=0.0).contains(&gap);
    outcome(ok, format!("4x1000 pairs, worst margin {worst:.2e}; equality case measured-bound = {gap:.2e}"))
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for f in factors() {
        for i in 0..100u64 {
            let mut rng = substream(SEED, &format!("minimax:{f}"), i);
            let x = random_element(f, RandomModel::UniformGap { min_gap: 0.1 }, &mut rng).unwrap();
            let n = rng.random_range(1..=f.rank().saturating_sub(1).max(1));
            match check_minimax(&x, n, 4, &mut rng) {
                Ok(r) => {
                    ok &= r.pass && no_failures(&r);
                    worst = worst.min(r.margin);
                }
                Err(_) => ok = false,
            }
        }
    }
    outcome(ok, format!("4x100 (x, n), all four certificates and witnesses, worst margin {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let (mut canon, mut spread, mut worst): (f64, f64, f64) = (0.0, 0.0, f64::INFINITY);
    for f in factors() {
        for (i, p) in [1.0, 1.5, 2.0].into_iter().enumerate() {
            let mut rng = substream(SEED, &format!("kyfan:{f}"), i as u64);
            let x = random_element(f, RandomModel::UniformGap { min_gap: 0.1 }, &mut rng).unwrap();
            let n = rng.random_range(1..=f.rank());
            let r = match check_kyfan(&x, n, p, 100, &mut rng) {
                Ok(r) => r,
                Err(_) => return outcome(false, format!("{f}: checker error")),
            };
            canon = canon.max(r.measured["i.canonical"]);
            if p == 2.0 {
                spread = spread.max(r.measured["iii.spread"]);
            }
            worst = worst.min(margin_of(&r, "ii.lower")).min(margin_of(&r, "ii.upper"));
            ok &= r.samples >= 100 && no_failures(&r);
        }
    }
    ok &= canon <= KYFAN_CANONICAL && spread <= KYFAN_SPREAD && worst >= -tolerance_ineq();
    outcome(
        ok,
        format!("p in {{1, 1.5, 2}}, canonical err {canon:.2e}, p=2 spread {spread:.2e}, frame-bound margin {worst:.2e}"),
    )
}

fn tolerance_ineq() -> f64 {
    jtlab::tol::INEQ
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for n in [2, 3, 4] {
        let f = FactorDescriptor::Type3 { n };
        for i in 0..100u64 {
            let mut rng = substream(SEED, &format!("stochastic:{n}"), i);
            let k = rng.random_range(1..=n);
            let e = random_tripotent(f, k, &mut rng).unwrap();
            let (Some(vs), Some(us)) = (random_frame_in(&e, &mut rng), random_frame_in(&e, &mut rng)) else {
                ok = false;
                continue;
            };
            let r = check_doubly_stochastic(&vs, &us).unwrap();
            worst = worst.max(r.measured["row_sum"]).max(r.measured["col_sum"]);
            ok &= margin_of(&r, "min_entry") >= -STOCHASTIC;
        }
    }
    outcome(ok && worst <= STOCHASTIC, format!("300 frame pairs in type3 n=2,3,4, worst |sum-1| {worst:.2e}"))
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for suite in ["tripotent_distance", "peirce_continuity", "davis", "support_perturbation"] {
        let mut fs = factors();
        if suite == "davis" {
            fs = vec![FactorDescriptor::Type1 { rows: 3, cols: 3 }, FactorDescriptor::Type3 { n: 3 }];
        }
        let mut worst = f64::INFINITY;
        for f in fs {
            let r = run_suite_on(suite, f, 100, SEED, Some(PERTURBATION_SLACK)).unwrap();
            ok &= r.pass && no_failures(&r);
            worst = worst.min(r.margin);
        }
        lines.push(format!("{suite} {worst:.2e}"));
    }
    outcome(ok, format!("100 trials per factor, worst margins: {}", lines.join(", ")))
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut min_delta = f64::INFINITY;
    let fs = factors();
    for b in 0..20u64 {
        let f = fs[b as usize % fs.len()];
        let mut rng = substream(SEED, "continuity", b);
        let x = random_element(f, RandomModel::UniformGap { min_gap: 0.2 }, &mut rng).unwrap();
        let n = 1 + (b as usize / fs.len()) % f.rank().min(3);
        match check_spectral_continuity(&x, n, CONTINUITY_EPS, 100, &mut rng) {
            Ok(r) => {
                ok &= r.pass && no_failures(&r) && r.measured["delta"] > 0.0;
                ok &= r.measured["rank_change"] == 0.0;
                min_delta = min_delta.min(r.measured["delta"]);
                worst = worst.max(r.measured["resolution_distance"]);
            }
            Err(_) => ok = false,
        }
    }
    ok &= worst <= CONTINUITY_EPS;
    outcome(ok, format!("20 bases x 100 perturbations, max |e_i-f_i| {worst:.2e} <= 0.1, min delta {min_delta:.2e}"))
}

fn criterion_9() -> Outcome {
    let mut ok = true;
    let (mut rec, mut ball, mut prox): (f64, f64, f64) = (0.0, 0.0, f64::INFINITY);
    for f in factors() {
        let r = run_suite_on("co_split", f, 100, SEED, None).unwrap();
        ok &= no_failures(&r);
        rec = rec.max(r.measured["recombination"]);
        ball = ball.max(r.measured["ball"]);
        prox = prox.min(margin_of(&r, "proximity"));
    }
    ok &= rec <= RECOMBINATION && ball <= 1.0 + BALL && prox >= -PROXIMITY;

    let f = FactorDescriptor::Type2 { n: 4 };
    let mut rng = substream(SEED, "co:identity", 0);
    let x = random_element(f, RandomModel::UniformGap { min_gap: 0.1 }, &mut rng).unwrap();
    let x = x.scale_re(0.9 / x.norm());
    let sp = CoSplitter::new(std::slice::from_ref(&x), &[1.0], 0.1).unwrap();
    let y = &x + &Element::unit(f, 0, 1).scale_re(0.5 * sp.delta());
    let one = co_split(&[x], &[1.0], &y, 0.1).unwrap();
    let identity = one.outputs.len() == 1 && one.outputs[0] == y;
    ok &= identity;
    outcome(
        ok,
        format!("4x100 instances, recombination {rec:.2e}, max norm {ball:.12}, proximity margin {prox:.2e}, n=1 identity {identity}"),
    )
}

fn criterion_10() -> Outcome {
    let dir = std::env::temp_dir().join(format!("jtlab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut reports = Vec::new();
    let mut codes = Vec::new();
    for k in 0..2 {
        let out = dir.join(format!("report{k}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_lab"))
            .args(["verify", "all", "--trials", "20", "--seed", "42", "--out", out.to_str().unwrap()])
            .output()
            .expect("lab runs");
        codes.push(status.status.code());
        reports.push(std::fs::read(&out).unwrap_or_default());
    }
    let _ = std::fs::remove_dir_all(&dir);
    let same = !reports[0].is_empty() && reports[0] == reports[1];
    outcome(same && codes.iter().all(|c| *c == Some(0)), format!("two full runs, {} bytes, identical {same}, exit codes {codes:?}", reports[0].len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence", criterion_1),
        ("example reproduction", criterion_2),
        ("weyl", criterion_3),
        ("minimax", criterion_4),
        ("ky fan", criterion_5),
        ("doubly stochastic", criterion_6),
        ("perturbation bounds", criterion_7),
        ("spectral continuity", criterion_8),
        ("property (co)", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        all &= o.pass;
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
