//! `abel`: solve Abel equations from problem files and run the verification sweeps.

mod commands;
mod output;
mod params;

use clap::{Parser, Subcommand};
use params::Common;
use std::process::ExitCode;

#[derive(Parser)]
#[command(version, about, long_about = None)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem in --input and write report.json and coefficients.csv
    Solve,
    /// Compare the closed-form coupling matrix with the quadrature oracle
    ValidateMatrix {
        /// Perturb cell (m, n) of every assembled matrix before comparing
        #[arg(long, value_name = "M,N")]
        corrupt_entry: Option<String>,
        /// Number of random parameter draws added to the grid
        #[arg(long, default_value_t = 4)]
        draws: usize,
    },
    /// Tabulate I_mk and d_k(η) and check their boundedness and decrease
    LemmaSweep,
    /// Write the row-sum decay table and its power-law fit
    DecayReport {
        /// Replace the row sums by m^(−λ) for this λ
        #[arg(long, value_name = "LAMBDA", allow_hyphen_values = true)]
        synthetic_rows_exponent: Option<f64>,
    },
}

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Diagnostic = 2,
    ValidationFailed = 3,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Solve => commands::solve::run(&cli.common),
        Command::ValidateMatrix {
            corrupt_entry,
            draws,
        } => commands::validate::run(&cli.common, corrupt_entry.as_deref(), *draws),
        Command::LemmaSweep => commands::lemma::run(&cli.common),
        Command::DecayReport {
            synthetic_rows_exponent,
        } => commands::decay::run(&cli.common, *synthetic_rows_exponent),
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
