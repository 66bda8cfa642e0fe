//! `xxz`: observables, threshold curves, velocities, exponents and
//! verification suites for the massless XXZ chain.

mod commands;
mod config;
mod error;

use clap::{Parser, Subcommand};
use config::{Overrides, RunConfig};
use error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "xxz", version, about = "Massless XXZ chain: observables, thresholds and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the dressed equations and write observables as JSON.
    Solve(Args),
    /// Threshold singularity curves as CSV.
    Curves(Args),
    /// Velocity v1 over the hole and particle ranges as CSV.
    Velocity(Args),
    /// Edge exponents along every threshold curve as CSV.
    Exponents(Args),
    /// Run verification suites and write a JSON report.
    Verify(Args),
}

#[derive(clap::Args, Debug)]
struct Args {
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Overrides,
}

impl Command {
    fn args(&self) -> &Args {
        match self {
            Command::Solve(a)
            | Command::Curves(a)
            | Command::Velocity(a)
            | Command::Exponents(a)
            | Command::Verify(a) => a,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let args = cli.command.args();
    let base = match &args.config {
        Some(path) => Overrides::load(path)?,
        None => Overrides::default(),
    };
    let mut cfg = RunConfig::resolve(args.flags.clone().over(base))?;
    if let Some(w) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {w} workers: {e}")))?;
    }
    let (text, failed) = match cli.command {
        Command::Solve(_) => {
            cfg.out.get_or_insert_with(|| PathBuf::from("observables.json"));
            (commands::solve(&cfg)?, 0)
        }
        Command::Curves(_) => (commands::curves(&cfg)?, 0),
        Command::Velocity(_) => (commands::velocity(&cfg)?, 0),
        Command::Exponents(_) => (commands::exponents(&cfg)?, 0),
        Command::Verify(_) => commands::verify(&cfg)?,
    };
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?
        }
        None => print!("{text}"),
    }
    if failed > 0 {
        return Err(CliError::Failed(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("xxz: {e}");
            e.exit_code()
        }
    }
}
