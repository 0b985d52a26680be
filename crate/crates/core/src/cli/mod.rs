//! Command-line scenario runner.

pub mod config;
pub mod report;
pub mod scenarios;

use std::path::PathBuf;

use clap::Parser;

pub use config::{Overrides, ScenarioConfig, SCENARIOS};
pub use report::{emit_report, Check, Report};
pub use scenarios::run_scenario;

use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "qfock",
    version,
    about = "Certificates for operators on the quaternionic Fock space"
)]
pub struct Args {
    /// One of: verify-kernel, verify-star, verify-exp-closed, certify-operator,
    /// certify-conjugation, certify-symmetry, weyl-group
    pub scenario: String,
    /// TOML configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Replaces the tolerance of every check
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn resolve_config(args: &Args) -> Result<ScenarioConfig> {
    let base = match &args.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    let o = Overrides {
        truncation: args.truncation,
        tol: args.tol,
        seed: args.seed,
    };
    base.with_scenario(&args.scenario, &o)
}

/// Runs the CLI and returns the process exit code: 0 when every check
/// passes, 1 when some check fails, 2 on errors.
pub fn run(args: &Args) -> i32 {
    let outcome = resolve_config(args).and_then(|cfg| run_scenario(&cfg));
    let report = match outcome {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qfock: {e}");
            return 2;
        }
    };
    match &args.report {
        Some(path) => {
            if let Err(e) = emit_report(&report, path) {
                eprintln!("qfock: {e}");
                return 2;
            }
        }
        None => print!("{}", report.to_json()),
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        match &c.detail {
            Some(d) => eprintln!("FAIL {}: {}", c.name, d),
            None => eprintln!(
                "FAIL {}: residual {:e} > {:e}",
                c.name, c.residual, c.tolerance
            ),
        }
    }
    if report.passed() {
        0
    } else {
        1
    }
}
