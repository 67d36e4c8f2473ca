use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use jtlab::co::co_split;
use jtlab::lab::{parse_suites, run_suite, Tolerances, TrialConfig};
use jtlab::spectral::{atomic_decompose, spectral_decompose};
use jtlab::{Element, Error, FactorDescriptor};

#[derive(Parser)]
#[command(name = "lab", version, about = "JB*-triple calculus and randomized inequality checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Atomic,
    Spectral,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose an element read from a JSON file.
    Decompose {
        #[arg(long)]
        factor: FactorDescriptor,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "atomic")]
        mode: Mode,
    },
    /// Run randomized checker suites and emit a JSON report.
    Verify {
        /// Comma-separated suite names, or `all`.
        suites: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Factor spec; repeat for several factors.
        #[arg(long)]
        factor: Vec<FactorDescriptor>,
        /// Pass slack applied to every margin.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON file with TrialConfig fields; command-line flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Split a perturbation of a convex combination into in-ball perturbations.
    CoSplit {
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        epsilon: f64,
    },
}

enum Failure {
    Usage(String),
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Accepts either a full element document or its bare `data` array.
fn read_element(path: &Path, factor: Option<FactorDescriptor>) -> Result<Element, Failure> {
    let v = read_json(path)?;
    let v = match (v, factor) {
        (serde_json::Value::Array(a), Some(f)) => json!({ "factor": f, "data": a }),
        (serde_json::Value::Array(_), None) => {
            return Err(Failure::Usage(format!("{}: bare data needs a factor", path.display())))
        }
        (v, _) => v,
    };
    let x = Element::from_json(&v)?;
    if let Some(f) = factor {
        if x.factor() != f {
            return Err(Failure::Usage(format!("{}: element is in {}, expected {f}", path.display(), x.factor())));
        }
    }
    Ok(x)
}

fn emit(v: &impl serde::Serialize) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Decompose { factor, input, mode } => {
            let x = read_element(&input, Some(factor))?;
            match mode {
                Mode::Atomic => emit(&atomic_decompose(&x)),
                Mode::Spectral => emit(&spectral_decompose(&x)),
            }
        }
        Command::Verify { suites, trials, seed, factor, tolerance, out, config } => {
            let mut cfg = match &config {
                Some(p) => serde_json::from_value::<TrialConfig>(read_json(p)?)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
                None => TrialConfig {
                    factors: vec![],
                    trials: 100,
                    master_seed: 0,
                    tolerances: Tolerances::default(),
                    suites: vec![],
                    output: None,
                },
            };
            if let Some(s) = suites {
                cfg.suites = parse_suites(&s);
            } else if config.is_none() {
                return Err(Failure::Usage("no suites given".into()));
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if !factor.is_empty() {
                cfg.factors = factor;
            }
            if tolerance.is_some() {
                cfg.tolerances.ineq = tolerance;
            }
            if let Some(p) = out {
                cfg.output = Some(p.display().to_string());
            }
            let report = run_suite(&cfg)?;
            let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Usage(e.to_string()))?;
            match &cfg.output {
                Some(p) => std::fs::write(p, text + "\n").map_err(|e| Failure::Usage(format!("{p}: {e}")))?,
                None => println!("{text}"),
            }
            for (name, results) in &report.suites {
                for r in results {
                    eprintln!("{} {name} {} margin={:.3e}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.margin);
                }
            }
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::CoSplit { inputs, weights, y, epsilon } => {
            let xs = inputs.iter().map(|p| read_element(p, None)).collect::<Result<Vec<_>, _>>()?;
            let y = read_element(&y, xs.first().map(Element::factor))?;
            let split = match co_split(&xs, &weights, &y, epsilon) {
                Ok(s) => s,
                Err(e @ (Error::DeltaExceeded { .. } | Error::DegenerateGap(_))) => {
                    eprintln!("lab: {e}");
                    return Err(Failure::Check);
                }
                Err(e) => return Err(e.into()),
            };
            let check = split.check();
            emit(&json!({ "split": split, "check": check }))?;
            if check.pass {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("lab: {m}");
            ExitCode::from(2)
        }
    }
}
