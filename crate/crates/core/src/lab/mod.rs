//! Experiment runner: configuration, exponent fits, CSV records and the CLI.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod fit;
pub mod table;

pub use cli::cli_main;
pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::{run_experiment, run_experiment_with_threads, Report};
pub use fit::{fit_exponent, FitResult, LogCorrection};
pub use table::{Cell, Table};
