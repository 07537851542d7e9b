//! `connfield` experiment runner.
//!
//! Exit codes: 0 on success, 1 on config, input or I/O errors, 2 when the
//! flow diverges.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use connfield::flow::PenaltyMode;
use connfield::{BoundaryMode, Error};

#[derive(Parser)]
#[command(
    name = "connfield",
    version,
    about = "Phase-field perimeter minimization with a connectedness penalty"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the gradient flow described by a config file.
    Run {
        config: PathBuf,
        /// Suppress the progress summary.
        #[arg(long)]
        quiet: bool,
    },
    /// Report components, β-masses, geodesic distances and energies of a field.
    Measure {
        field: PathBuf,
        #[arg(long, default_value_t = 0.35)]
        alpha: f64,
        #[arg(long, default_value_t = 5e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 300.0)]
        eta: f64,
        #[arg(long, default_value = "dirichlet")]
        bc: BoundaryMode,
        #[arg(long, default_value = "connected")]
        penalty: PenaltyMode,
        /// Also write the geodesic table as CSV.
        #[arg(long)]
        geodesics: Option<PathBuf>,
    },
    /// Sharp-interface reference values of a mask thresholded at 1/2.
    Oracle { mask: PathBuf },
    /// Write a preset's rasters and config into a directory.
    Preset {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Divergence { .. }) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run { config, quiet } => commands::run(&config, quiet),
        Command::Measure {
            field,
            alpha,
            epsilon,
            eta,
            bc,
            penalty,
            geodesics,
        } => commands::measure(
            &field,
            alpha,
            epsilon,
            eta,
            bc,
            penalty,
            geodesics.as_deref(),
        ),
        Command::Oracle { mask } => commands::oracle(&mask),
        Command::Preset { name, out } => commands::preset(&name, &out),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
