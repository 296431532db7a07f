//! `measim` — batch front end for the measurement-simulation toolkit.
//!
//! Subcommands: `sg run`, `sg calibrate`, `tomography`, `inequalities`,
//! `sample`, `convergence`. Exit codes: 0 success, 2 configuration or
//! validation error, 3 numerical guard tripped.

mod commands;
mod output;
mod schema;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "measim", version, about = "Generalized quantum measurement simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory for reports and tables.
    #[arg(long, global = true, default_value = "measim-out")]
    out: PathBuf,

    /// Write only JSON reports.
    #[arg(long, global = true)]
    json: bool,

    /// Write only CSV tables.
    #[arg(long, global = true)]
    csv: bool,

    /// Comment-prefix CSV headers so gnuplot can read the tables directly.
    #[arg(long, global = true)]
    gnuplot_ready: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Stern-Gerlach grid simulations.
    Sg {
        #[command(subcommand)]
        action: SgAction,
    },
    /// Extract the effective object-side POVM of a premeasurement model.
    Tomography(commands::tomography::TomographyArgs),
    /// Evaluate the Martens, generalized-Martens and Robertson inequalities.
    Inequalities(commands::inequalities::InequalitiesArgs),
    /// Draw outcome samples from a probability record.
    Sample(commands::sample::SampleArgs),
    /// Law-of-large-numbers convergence study.
    Convergence(commands::sample::ConvergenceArgs),
}

#[derive(Subcommand)]
enum SgAction {
    /// Evolve a packet and bin the final momenta.
    Run(commands::sg::SgRunArgs),
    /// Run the σ_z eigenstate calibration inputs and report λ.
    Calibrate(commands::sg::SgCalibrateArgs),
}

/// What gets written: both kinds unless exactly one of --json/--csv is set.
#[derive(Clone, Copy)]
pub struct OutputSelection {
    pub json: bool,
    pub csv: bool,
}

pub struct Ctx {
    pub out_dir: PathBuf,
    pub selection: OutputSelection,
    pub gnuplot_ready: bool,
}

#[derive(Args)]
pub struct NoArgs {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let selection = match (cli.json, cli.csv) {
        (true, false) => OutputSelection {
            json: true,
            csv: false,
        },
        (false, true) => OutputSelection {
            json: false,
            csv: true,
        },
        _ => OutputSelection {
            json: true,
            csv: true,
        },
    };
    let ctx = Ctx {
        out_dir: cli.out,
        selection,
        gnuplot_ready: cli.gnuplot_ready,
    };
    // the output directory must be writable before any computation starts
    if let Err(err) = std::fs::create_dir_all(&ctx.out_dir) {
        eprintln!("error: cannot create {}: {err}", ctx.out_dir.display());
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Sg {
            action: SgAction::Run(args),
        } => commands::sg::run(&ctx, args),
        Command::Sg {
            action: SgAction::Calibrate(args),
        } => commands::sg::calibrate(&ctx, args),
        Command::Tomography(args) => commands::tomography::run(&ctx, args),
        Command::Inequalities(args) => commands::inequalities::run(&ctx, args),
        Command::Sample(args) => commands::sample::run_sample(&ctx, args),
        Command::Convergence(args) => commands::sample::run_convergence(&ctx, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// 3 for numerical guards, 2 for everything else (config, validation, I/O).
fn exit_code_for(err: &anyhow::Error) -> u8 {
    if let Some(core) = err.downcast_ref::<measim_core::Error>() {
        if core.is_numerical_guard() {
            return 3;
        }
    }
    2
}
