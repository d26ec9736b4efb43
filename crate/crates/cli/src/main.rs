//! `qkd3`: phase-error bounds, secure regions, decoy-state distance curves and
//! protocol simulations as CSV/JSON, each with a reproducibility manifest.

mod commands;
mod format;
mod manifest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use commands::{BoundArgs, DecoyArgs, Fig1Args, RegionArgs, SimulateArgs};

#[derive(Debug, Parser)]
#[command(name = "qkd3", version, about = "Three-state QKD security analysis")]
struct Cli {
    /// Write the result here (plus FILE.manifest.json) instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Phase error bounds at one (e_b, alpha), as JSON.
    Bound(BoundArgs),
    /// Exact, approximate and 5 e_b bounds along e_b = alpha, as CSV.
    Fig1(Fig1Args),
    /// Secure-region frontier (alpha, largest tolerable e_b), as CSV.
    Region(RegionArgs),
    /// Optimized decoy-state key rate against distance, as CSV.
    Decoy(DecoyArgs),
    /// Monte Carlo run of the protocol, as JSON.
    Simulate(SimulateArgs),
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qkd3_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use qkd3_core::Error as E;
        match self {
            CliError::Core(E::Parse(_)) => 2,
            CliError::Core(E::InsufficientSift { .. } | E::SamplingBudget(_)) => 4,
            CliError::Core(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("QKD3_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, output, params, seeds) = match &cli.command {
        Command::Bound(a) => ("bound", commands::bound(a)?, serde_json::to_value(a), vec![]),
        Command::Fig1(a) => ("fig1", commands::fig1(a)?, serde_json::to_value(a), vec![]),
        Command::Region(a) => ("region", commands::region(a)?, serde_json::to_value(a), vec![]),
        Command::Decoy(a) => ("decoy", commands::decoy(a)?, serde_json::to_value(a), vec![]),
        Command::Simulate(a) => (
            "simulate",
            commands::simulate(a)?,
            serde_json::to_value(a),
            vec![a.seed],
        ),
    };
    match &cli.out {
        None => std::io::stdout().write_all(output.as_bytes())?,
        Some(path) => {
            std::fs::write(path, &output)?;
            let argv: Vec<String> = std::env::args().skip(1).collect();
            let m = manifest::RunManifest::new(
                name,
                params.expect("arguments serialize"),
                seeds,
                argv,
                path,
                output.as_bytes(),
            );
            m.write_beside(path)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qkd3: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
