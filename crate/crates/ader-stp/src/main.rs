use std::process::ExitCode;

use ader_stp::cli::{Cli, Command};
use ader_stp::UsageError;
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let csv_out = match &cli.command {
        Command::Check(a) => &a.common.csv_out,
        Command::Convergence(a) => &a.common.csv_out,
        Command::Bench(a) => &a.common.csv_out,
        Command::Footprint(a) => &a.common.csv_out,
    };
    let report = match ader_stp::execute(&cli) {
        Ok(r) => r,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    // check reports to stdout; the other commands keep stdout for CSV
    let is_check = matches!(cli.command, Command::Check(_));
    for line in &report.lines {
        if is_check {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    if csv_out.is_some() || !is_check {
        if let Err(e) = report.table.emit(csv_out.as_deref()) {
            eprintln!("error: writing CSV: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(report.outcome.exit_code() as u8)
}
