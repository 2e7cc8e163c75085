//! `coupler-lab`: machine-readable verification reports for the coupler
//! simulator.
//!
//! Exit codes: 0 when every check passes, 1 when a numeric check fails,
//! 2 for configuration and precondition errors. Reports go to stdout (or
//! `--out`); diagnostics go to stderr.

mod commands;
mod config;
mod report;

use std::f64::consts::PI;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coupler_core::Error as CoreError;

use crate::config::RunArgs;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot write report: {0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(CoreError::EigenFailure)
            | CliError::Core(CoreError::NonFinite)
            | CliError::Core(CoreError::ConvergenceFailure) => 1,
            _ => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "coupler-lab", version, about = "Bandgap coupler verification reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the exact and factorized propagators and check the su(2) relations
    Verify {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Phase truth table on the computational states at a time or gate-time index
    TruthTable {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the phase-gate family and run the gate self-tests
    Gates {
        #[command(flatten)]
        run: RunArgs,
        /// Phase of the single-qubit and two-qubit relative gates
        #[arg(long, default_value_t = PI, allow_negative_numbers = true)]
        theta: f64,
    },
    /// Search a time grid for instants where the coupler acts as a known gate
    Scan {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0.1)]
        t_min: f64,
        #[arg(long, default_value_t = 13.0)]
        t_max: f64,
        #[arg(long, default_value_t = 5000)]
        steps: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify { run } => commands::verify(run),
        Command::TruthTable { run } => commands::truth_table_cmd(run),
        Command::Gates { run, theta } => commands::gates(run, *theta),
        Command::Scan {
            run,
            t_min,
            t_max,
            steps,
        } => commands::scan(run, *t_min, *t_max, *steps),
    };
    match outcome {
        Ok(verdict) if verdict.passed => {
            eprintln!("pass: {}", verdict.summary);
            ExitCode::SUCCESS
        }
        Ok(verdict) => {
            eprintln!("FAIL: {}", verdict.summary);
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
