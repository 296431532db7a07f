//! `measim sg run` / `measim sg calibrate`.

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;
use std::path::PathBuf;

use measim_core::nonideality::row_entropy_j;
use measim_core::sampling::sample_outcomes;
use measim_core::sterngerlach::{
    build_initial_state, calibrate_with as sg_calibrate_with, evolve_sg_recording,
    field_divergence_check, readout_momentum_bins, SgParams, SgVariant,
};
use measim_core::ProbabilityRecord;

use crate::output::{config_digest, fmt_f64, write_json_report, write_table, Table};
use crate::schema::{parse_spin, StochasticFile};
use crate::Ctx;

/// Parameter overrides shared by the sg subcommands. Precedence:
/// flags > config file > built-in defaults.
#[derive(Args, Clone)]
pub struct SgFlags {
    /// JSON config file with SgParams fields (all optional).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub variant: Option<SgVariant>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long)]
    pub extent: Option<f64>,
    #[arg(long)]
    pub packet_width: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// JSON file overriding validation tolerances (partial records allowed).
    #[arg(long)]
    pub tolerances: Option<PathBuf>,
}

impl SgFlags {
    /// Validation tolerances for grid-extracted objects: the override file
    /// when given, grid-grade defaults otherwise.
    pub fn resolve_tolerances(&self) -> Result<measim_core::Tolerances> {
        match &self.tolerances {
            Some(path) => {
                let text = crate::output::read_to_string(path)?;
                Ok(serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?)
            }
            None => Ok(measim_core::Tolerances::grid_extracted()),
        }
    }

    pub fn resolve(&self) -> Result<SgParams> {
        let mut params = match &self.config {
            Some(path) => {
                let text = crate::output::read_to_string(path)?;
                serde_json::from_str::<SgParams>(&text)
                    .with_context(|| format!("parsing {}", path.display()))?
            }
            None => SgParams::default(),
        };
        if let Some(v) = self.variant {
            params.variant = v;
        }
        if let Some(v) = self.a {
            params.a = v;
        }
        if let Some(v) = self.b {
            params.b = v;
        }
        if let Some(v) = self.mu {
            params.mu = v;
        }
        if let Some(v) = self.mass {
            params.mass = v;
        }
        if let Some(v) = self.tau {
            params.tau = v;
        }
        if let Some(v) = self.grid_n {
            params.grid_n = v;
        }
        if let Some(v) = self.extent {
            params.extent = v;
        }
        if let Some(v) = self.packet_width {
            params.packet_width = v;
        }
        if let Some(v) = self.steps {
            params.steps = Some(v);
        }
        params.validate()?;
        Ok(params)
    }
}

#[derive(Args)]
pub struct SgRunArgs {
    #[command(flatten)]
    pub flags: SgFlags,
    /// Initial spin state (z+, z-, x+, x-, y+, y-, generic).
    #[arg(long, default_value = "z+")]
    pub spin: String,
    /// Also run the eigenstate calibration and emit λ.
    #[arg(long)]
    pub calibrate: bool,
    /// Draw this many outcome samples from the final bins.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Seed for sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record observables every this many steps in the time series.
    #[arg(long, default_value_t = 1)]
    pub sample_every: usize,
}

#[derive(Serialize)]
struct SgRunConfig {
    params: SgParams,
    spin: String,
    seed: u64,
    samples: Option<u64>,
    sample_every: usize,
}

#[derive(Serialize)]
struct SgRunReport {
    command: &'static str,
    config: SgRunConfig,
    input_digest: String,
    steps: usize,
    probabilities: ProbabilityRecord,
    diagnostics: SgDiagnostics,
    lambda: Option<StochasticFile>,
    lambda_row_entropy: Option<f64>,
    sample_counts: Option<measim_core::SampleCounts>,
}

#[derive(Serialize)]
struct SgDiagnostics {
    norm_drift: f64,
    mean_py: f64,
    mean_pz: f64,
    sigma_x: f64,
    sigma_y: f64,
    sigma_z: f64,
    /// (μ/2)·b·τ·⟨σ_z⟩(0), the Heisenberg-picture drift (exact for the
    /// ideal variant).
    ehrenfest_prediction: f64,
    field_divergence: f64,
}

pub fn run(ctx: &Ctx, args: SgRunArgs) -> Result<()> {
    let params = args.flags.resolve()?;
    let spin = parse_spin(&args.spin)?;
    let steps = params.resolved_steps()?;

    let initial = build_initial_state(&params, &spin)?;
    let sigma_z0 = initial.sigma_expectations()[2];
    let (final_state, series) = evolve_sg_recording(&initial, &params, args.sample_every)?;
    let bins = readout_momentum_bins(&final_state, params.variant)?;

    let (mean_py, mean_pz) = final_state.mean_momentum();
    let [sigma_x, sigma_y, sigma_z] = final_state.sigma_expectations();
    let diagnostics = SgDiagnostics {
        norm_drift: (final_state.norm_squared() - 1.0).abs(),
        mean_py,
        mean_pz,
        sigma_x,
        sigma_y,
        sigma_z,
        ehrenfest_prediction: 0.5 * params.mu * params.b * params.tau * sigma_z0,
        field_divergence: field_divergence_check(params.variant, &params),
    };

    let lambda = if args.calibrate {
        Some(sg_calibrate_with(&params, &args.flags.resolve_tolerances()?)?)
    } else {
        None
    };

    let sample_counts = match args.samples {
        Some(n) => Some(sample_outcomes(&bins, n, args.seed)?),
        None => None,
    };

    let config = SgRunConfig {
        params: params.clone(),
        spin: args.spin.clone(),
        seed: args.seed,
        samples: args.samples,
        sample_every: args.sample_every,
    };
    let report = SgRunReport {
        command: "sg run",
        input_digest: config_digest(&config),
        config,
        steps,
        probabilities: bins.clone(),
        lambda: lambda.as_ref().map(StochasticFile::from_matrix),
        lambda_row_entropy: lambda.as_ref().map(row_entropy_j),
        sample_counts,
        diagnostics,
    };
    write_json_report(ctx, "sg-run-report.json", &report)?;

    let bins_table = Table {
        header: vec!["label", "probability"],
        rows: bins
            .labels()
            .iter()
            .zip(bins.probabilities())
            .map(|(l, p)| vec![l.clone(), fmt_f64(*p)])
            .collect(),
    };
    write_table(ctx, "sg-bins.csv", &bins_table)?;

    let series_table = Table {
        header: vec!["t", "mean_py", "mean_pz", "sigma_x", "sigma_y", "sigma_z", "norm"],
        rows: series
            .iter()
            .map(|s| {
                vec![
                    fmt_f64(s.t),
                    fmt_f64(s.mean_py),
                    fmt_f64(s.mean_pz),
                    fmt_f64(s.sigma_x),
                    fmt_f64(s.sigma_y),
                    fmt_f64(s.sigma_z),
                    fmt_f64(s.norm),
                ]
            })
            .collect(),
    };
    write_table(ctx, "sg-timeseries.csv", &series_table)?;

    if let Some(lam) = &lambda {
        write_lambda_csv(ctx, lam)?;
    }
    Ok(())
}

#[derive(Args)]
pub struct SgCalibrateArgs {
    #[command(flatten)]
    pub flags: SgFlags,
}

#[derive(Serialize)]
struct SgCalibrateReport {
    command: &'static str,
    config: SgParams,
    input_digest: String,
    lambda: StochasticFile,
    row_entropy_j: f64,
    column_sums: Vec<f64>,
}

pub fn calibrate(ctx: &Ctx, args: SgCalibrateArgs) -> Result<()> {
    let params = args.flags.resolve()?;
    let lam = sg_calibrate_with(&params, &args.flags.resolve_tolerances()?)?;
    let column_sums: Vec<f64> = (0..lam.cols())
        .map(|c| (0..lam.rows()).map(|r| lam.entry(r, c)).sum())
        .collect();
    let report = SgCalibrateReport {
        command: "sg calibrate",
        input_digest: config_digest(&params),
        config: params,
        lambda: StochasticFile::from_matrix(&lam),
        row_entropy_j: row_entropy_j(&lam),
        column_sums,
    };
    write_json_report(ctx, "sg-calibrate-report.json", &report)?;
    write_lambda_csv(ctx, &lam)?;
    Ok(())
}

fn write_lambda_csv(ctx: &Ctx, lam: &measim_core::StochasticMatrix) -> Result<()> {
    let mut rows = Vec::new();
    for k in 0..lam.rows() {
        let mut row = vec![lam.row_labels()[k].clone()];
        for kp in 0..lam.cols() {
            row.push(fmt_f64(lam.entry(k, kp)));
        }
        rows.push(row);
    }
    // header: bin, then one column per PVM outcome
    let table = Table {
        header: vec!["bin", "z+", "z-"],
        rows,
    };
    write_table(ctx, "sg-lambda.csv", &table)
}
