//! `flowerperc`: exact oracles, Monte Carlo studies and rendering for flower
//! percolation.
//!
//! Exit status: 0 on success, 2 for invalid input, 3 when a verification or
//! property check fails, 1 for anything else.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{ExperimentConfig, ValidationError};

#[derive(Parser)]
#[command(name = "flowerperc", version, about = "Flower percolation on hexagonal tilings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON file with default option values; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    options: ExperimentConfig,
}

#[derive(Subcommand)]
enum Command {
    /// Check every exact single-flower identity and inequality.
    OracleVerify(Common),
    /// Estimate the separation fields on triangles and compare with the harmonic triple.
    Cardy(Common),
    /// Render a configuration as SVG, with its compact JSON form.
    Render(Common),
    /// Easy-way and hard-way rectangle crossings.
    Crossing(Common),
    /// One-arm probabilities and their log-log slope.
    Arms(Common),
    /// Contour integrals of the colour-neutral fields.
    Contour(Common),
}

fn merged(c: Common) -> anyhow::Result<ExperimentConfig> {
    let base = match &c.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    Ok(base.overlaid(&c.options))
}

fn run(cli: Cli) -> anyhow::Result<commands::Finished> {
    match cli.command {
        Command::OracleVerify(c) => commands::oracle_verify(merged(c)?),
        Command::Cardy(c) => commands::cardy(merged(c)?),
        Command::Render(c) => commands::render(merged(c)?),
        Command::Crossing(c) => commands::crossing(merged(c)?),
        Command::Arms(c) => commands::arms(merged(c)?),
        Command::Contour(c) => commands::contour(merged(c)?),
    }
}

fn is_validation(e: &anyhow::Error) -> bool {
    use flowerperc::Error as E;
    e.downcast_ref::<ValidationError>().is_some()
        || matches!(
            e.downcast_ref::<E>(),
            Some(
                E::InvalidParams(_)
                    | E::InvalidInput(_)
                    | E::DegenerateDomain(_)
                    | E::InvalidArrangement(_)
                    | E::MalformedEvent(_)
                    | E::HexOutsideDomain(_)
                    | E::TooLargeToRender { .. }
            )
        )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(done) if done.failures.is_empty() => ExitCode::SUCCESS,
        Ok(done) => {
            for f in &done.failures {
                eprintln!("check failed: {f}");
            }
            ExitCode::from(3)
        }
        Err(e) if is_validation(&e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
