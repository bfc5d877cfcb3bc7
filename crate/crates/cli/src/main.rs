//! `optomech`: steady states, tuning, response sweeps, diagnostics and figure
//! datasets for the BEC-cavity optomechanical model.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use optomech_core::{Execution, FigureId};

use crate::commands::Context;
use crate::config::{Format, RunConfig};
use crate::error::{exit, CliError};

#[derive(Parser)]
#[command(name = "optomech", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; built-in reference values are used when absent.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Lower grid edge in units of omega_R.
    #[arg(long, global = true, allow_negative_numbers = true)]
    grid_min: Option<f64>,
    /// Upper grid edge in units of omega_R.
    #[arg(long, global = true, allow_negative_numbers = true)]
    grid_max: Option<f64>,
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    plot: bool,
    /// Evaluate sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print the effective model constants and the single-mode metric.
    Derive,
    /// Print every mean-field root with its stability.
    Steady,
    /// Tune the coupling laser to the red mechanical sideband.
    Tune,
    /// Write the sideband spectrum and its features.
    Sweep,
    /// Write self-energy, spectral function and effective damping.
    Diag,
    /// Reproduce a figure dataset.
    Figure {
        #[arg(long, value_name = "ID")]
        figure: FigureId,
    },
}

fn context(common: &Common) -> Result<Context, CliError> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = common.grid_min {
        config.grid_min_over_omega_r = v;
    }
    if let Some(v) = common.grid_max {
        config.grid_max_over_omega_r = v;
    }
    if let Some(v) = common.grid_points {
        config.grid_points = v;
    }
    if let Some(v) = &common.out {
        config.out_dir = v.clone();
    }
    if let Some(v) = common.format {
        config.format = v;
    }
    config.plot |= common.plot;
    config.validate()?;
    let exec = if common.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    Ok(Context {
        config,
        exec,
        grid_override: common.grid_min.is_some()
            || common.grid_max.is_some()
            || common.grid_points.is_some(),
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let ctx = context(&cli.common)?;
    match &cli.command {
        Command::Derive => commands::derive_cmd(&ctx),
        Command::Steady => commands::steady_cmd(&ctx),
        Command::Tune => commands::tune_cmd(&ctx),
        Command::Sweep => commands::sweep_cmd(&ctx),
        Command::Diag => commands::diag_cmd(&ctx),
        Command::Figure { figure } => commands::figure_cmd(&ctx, *figure),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
