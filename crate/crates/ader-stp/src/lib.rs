//! Command-line harness around `ader-stp-core`: consistency checks,
//! convergence studies, benchmarks, footprint tables, CSV output and
//! plain-text dumps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod check;
pub mod cli;
pub mod convergence;
pub mod csv;
pub mod dump;
pub mod footprint;
pub mod parallel;
pub mod rng;
pub mod setup;

pub use setup::{Outcome, Report, UsageError};

/// Runs a parsed command line.
pub fn execute(cli: &cli::Cli) -> anyhow::Result<Report> {
    match &cli.command {
        cli::Command::Check(a) => check::run(a),
        cli::Command::Convergence(a) => convergence::run(a),
        cli::Command::Bench(a) => bench::run(a),
        cli::Command::Footprint(a) => footprint::run(a),
    }
}
