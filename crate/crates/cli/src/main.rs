//! `colest`: plan sampling policies, evaluate bounds, run simulations and
//! regenerate figure data.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration, 3 degenerate problem
//! (no feasible policy carries information about the target).

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::bounds::BoundsArgs;
use commands::simulate::SimulateArgs;
use commands::sweep::SweepArgs;
use config::RunConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "colest", version, about = "Optimal collection of correlated Gaussian observations under resource budgets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal sampling policy for a scenario.
    Plan {
        #[command(flatten)]
        run: RunConfig,
    },
    /// Per-slot CRB along one swept variable.
    Bounds {
        #[command(flatten)]
        run: RunConfig,
        #[command(flatten)]
        args: BoundsArgs,
    },
    /// Monte Carlo run compared against the analytic bound.
    Simulate {
        #[command(flatten)]
        run: RunConfig,
        #[command(flatten)]
        args: SimulateArgs,
    },
    /// Data behind one figure.
    Sweep {
        #[command(flatten)]
        run: RunConfig,
        #[command(flatten)]
        args: SweepArgs,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Plan { run } => commands::plan::run(&run.resolve()?),
        Command::Bounds { run, args } => commands::bounds::run(&run.resolve()?, &args),
        Command::Simulate { run, args } => commands::simulate::run(&run.resolve()?, &args),
        Command::Sweep { run, args } => commands::sweep::run(&run.resolve()?, &args),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
