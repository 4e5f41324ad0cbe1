//! `quasimode-lab <experiment> --config <path> --out <path> [--seed N]`.
//!
//! Exit codes: 0 when every threshold holds, 2 when one is violated, 1 on
//! any error (usage, config, numerics, I/O).

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{ExperimentConfig, ExperimentKind};
use super::experiments::run_experiment;
use crate::error::{Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_THRESHOLD: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "quasimode-lab", version, about = "Quasimode and bilinear-estimate experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// CSV output path; falls back to `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bilinear product norms along a frequency sweep.
    BilinearSweep(RunArgs),
    /// L4 norm growth of a quasimode family.
    L4Growth(RunArgs),
    /// Rank-truncation remainders of a product.
    RemainderDecay(RunArgs),
    /// Randomized products of spectral clusters.
    ClusterAudit(RunArgs),
    /// Eigenvalue counts against the Weyl term.
    WeylAudit(RunArgs),
    /// Exactness of the smooth split, dyadic blocks and unit windows.
    SplitAudit(RunArgs),
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        match self {
            Command::BilinearSweep(a) => (ExperimentKind::BilinearSweep, a),
            Command::L4Growth(a) => (ExperimentKind::L4Growth, a),
            Command::RemainderDecay(a) => (ExperimentKind::RemainderDecay, a),
            Command::ClusterAudit(a) => (ExperimentKind::ClusterAudit, a),
            Command::WeylAudit(a) => (ExperimentKind::WeylAudit, a),
            Command::SplitAudit(a) => (ExperimentKind::SplitAudit, a),
        }
    }
}

fn run(kind: ExperimentKind, args: RunArgs) -> Result<bool> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    let out = args
        .out
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| Error::Config("no output path: pass --out or set `output`".into()))?;
    let report = run_experiment(&cfg, kind)?;
    std::fs::write(&out, report.to_csv()?)?;
    println!("{}", report.summary());
    Ok(report.passed())
}

/// Parses `argv` (program name first), runs the experiment and returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let (kind, args) = cli.command.split();
    match run(kind, args) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_THRESHOLD,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
