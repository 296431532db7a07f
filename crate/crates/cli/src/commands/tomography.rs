//! `measim tomography` — effective-POVM extraction for a premeasurement
//! model (from file or built-in demo) or a Stern-Gerlach variant, with
//! optional Wigner-measure analysis and quorum reconstruction.

use anyhow::{anyhow, Result};
use clap::Args;
use serde::Serialize;
use std::path::PathBuf;

use measim_core::jsonrep::{matrix_to_json, model_from_json_str, MatrixJson};
use measim_core::nonideality::{nonideality_matrix, row_entropy_j};
use measim_core::sterngerlach::{
    extract_bivariate_effects_with, extract_effects_with, SgVariant,
};
use measim_core::wigner::{quorum_reconstruct, wigner_measure};
use measim_core::{
    max_abs_diff, qubit, DensityOperator, EffectSet, MeasurementModel, ProbabilityRecord,
    ProjectiveMeasure, Tolerances,
};

use crate::commands::sg::SgFlags;
use crate::output::{config_digest, write_json_report};
use crate::schema::{parse_spin, StochasticFile};
use crate::Ctx;

#[derive(Args)]
pub struct TomographyArgs {
    /// Premeasurement model JSON file.
    #[arg(long, conflicts_with_all = ["demo", "sg_variant"])]
    pub model: Option<PathBuf>,
    /// Built-in demo model: controlled-flip or identity.
    #[arg(long, conflicts_with = "sg_variant")]
    pub demo: Option<String>,
    /// Run detector tomography on a Stern-Gerlach variant instead.
    #[arg(long)]
    pub sg_variant: Option<SgVariant>,
    #[command(flatten)]
    pub sg: SgFlags,
    /// With the quadrupole variant: invert the nonideality matrices and
    /// report the Wigner-measure marginal identities.
    #[arg(long)]
    pub wigner: bool,
    /// Reconstruct this qubit state from exact σ_x, σ_y, σ_z statistics.
    #[arg(long)]
    pub quorum_spin: Option<String>,
    /// Use sampled statistics with this many shots per observable instead
    /// of exact probabilities.
    #[arg(long)]
    pub quorum_samples: Option<u64>,
    /// Seed for sampled quorum statistics.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Serialize)]
struct TomographyConfig {
    source: String,
    sg_params: Option<measim_core::SgParams>,
    wigner: bool,
    quorum_spin: Option<String>,
    quorum_samples: Option<u64>,
    seed: u64,
}

#[derive(Serialize)]
struct EffectsJson {
    labels: Vec<String>,
    matrices: Vec<MatrixJson>,
}

impl EffectsJson {
    fn from_set(set: &EffectSet) -> Self {
        Self {
            labels: set.labels().to_vec(),
            matrices: set.effects().iter().map(matrix_to_json).collect(),
        }
    }
}

#[derive(Serialize)]
struct WignerBlock {
    lambda: StochasticFile,
    mu: StochasticFile,
    lambda_condition: f64,
    mu_condition: f64,
    lambda_fit_residual: f64,
    mu_fit_residual: f64,
    marginal_identity_residual_y: f64,
    marginal_identity_residual_z: f64,
    min_wigner_eigenvalue: f64,
    negativity_found: bool,
}

#[derive(Serialize)]
struct QuorumBlock {
    spin: String,
    samples: Option<u64>,
    recovered: MatrixJson,
    max_error_vs_true: f64,
    residual: f64,
    projection_distance: f64,
    condition: f64,
    negative_raw_eigenvalue: bool,
}

#[derive(Serialize)]
struct TomographyReport {
    command: &'static str,
    config: TomographyConfig,
    input_digest: String,
    effects: EffectsJson,
    condition: f64,
    min_effect_eigenvalue: f64,
    completeness_defect: f64,
    identity_deviation_max: Option<f64>,
    no_information_transfer: bool,
    lambda: Option<StochasticFile>,
    lambda_fit_residual: Option<f64>,
    row_entropy_j: Option<f64>,
    wigner: Option<WignerBlock>,
    quorum: Option<QuorumBlock>,
}

pub fn run(ctx: &Ctx, args: TomographyArgs) -> Result<()> {
    let report = match (&args.model, &args.demo, args.sg_variant) {
        (Some(path), None, None) => {
            let text = crate::output::read_to_string(path)?;
            let model = model_from_json_str(&text)?;
            model_report(&args, format!("model:{}", path.display()), &model)?
        }
        (None, Some(name), None) => {
            let model = match name.as_str() {
                "controlled-flip" => MeasurementModel::controlled_flip(),
                "identity" => MeasurementModel::identity_demo(),
                other => return Err(anyhow!("unknown demo '{other}'")),
            };
            model_report(&args, format!("demo:{name}"), &model)?
        }
        (None, None, Some(variant)) => sg_report(&args, variant)?,
        _ => {
            return Err(anyhow!(
                "choose exactly one source: --model, --demo, or --sg-variant"
            ))
        }
    };

    let report = TomographyReport {
        quorum: quorum_block(&args)?,
        ..report
    };
    write_json_report(ctx, "tomography-report.json", &report)?;
    write_json_report(ctx, "effective-povm.json", &report.effects)?;
    Ok(())
}

fn build_config(
    args: &TomographyArgs,
    source: String,
    sg_params: Option<measim_core::SgParams>,
) -> TomographyConfig {
    TomographyConfig {
        source,
        sg_params,
        wigner: args.wigner,
        quorum_spin: args.quorum_spin.clone(),
        quorum_samples: args.quorum_samples,
        seed: args.seed,
    }
}

fn model_report(
    args: &TomographyArgs,
    source: String,
    model: &MeasurementModel,
) -> Result<TomographyReport> {
    let (effects, info) = model.extract_effective_povm_detailed()?;

    // identity deviation over the probe family plus seeded random states
    let mut states = measim_core::tomography::standard_probe_states(model.object_dim());
    let mut rng = measim_core::random::rng(7, 0);
    for _ in 0..16 {
        states.push(measim_core::random::density(&mut rng, model.object_dim()));
    }
    let mut identity_deviation_max: f64 = 0.0;
    for rho in &states {
        let dev = model.check_probability_identity_against(rho, &effects)?;
        identity_deviation_max = identity_deviation_max.max(dev);
    }

    let config = build_config(args, source, None);
    Ok(TomographyReport {
        command: "tomography",
        input_digest: config_digest(&config),
        config,
        effects: EffectsJson::from_set(&effects),
        condition: info.condition,
        min_effect_eigenvalue: info.min_eigenvalue,
        completeness_defect: info.completeness_defect,
        identity_deviation_max: Some(identity_deviation_max),
        no_information_transfer: MeasurementModel::is_no_information_transfer(&effects, 1e-8),
        lambda: None,
        lambda_fit_residual: None,
        row_entropy_j: None,
        wigner: None,
        quorum: None,
    })
}

fn sg_report(args: &TomographyArgs, variant: SgVariant) -> Result<TomographyReport> {
    let mut params = args.sg.resolve()?;
    params.variant = variant;
    let config = build_config(args, format!("sg:{variant}"), Some(params.clone()));
    let digest = config_digest(&config);

    let tol = args.sg.resolve_tolerances()?;
    if variant == SgVariant::Quadrupole {
        let (biv, info) = extract_bivariate_effects_with(&params, &tol)?;
        let flat_effects = {
            let mut effects = Vec::new();
            let mut labels = Vec::new();
            for k in 0..biv.rows() {
                for l in 0..biv.cols() {
                    effects.push(biv.effect(k, l).clone());
                    labels.push(format!("{} {}", biv.row_labels()[k], biv.col_labels()[l]));
                }
            }
            EffectSet::with_tolerances(effects, labels, &tol)?
        };

        let y_marg = biv.row_marginals(&tol)?;
        let z_marg = biv.col_marginals(&tol)?;
        let (lam, lam_res) = nonideality_matrix(&y_marg, &qubit::pvm_y())?;
        let (mu, mu_res) = nonideality_matrix(&z_marg, &qubit::pvm_z())?;

        let wigner = if args.wigner {
            let default_tol = Tolerances::default();
            let lam_inv = measim_core::invert_stochastic(&lam, &default_tol)?;
            let mu_inv = measim_core::invert_stochastic(&mu, &default_tol)?;
            let w = wigner_measure(&biv, &lam, &mu, &default_tol)?;
            let row = w.row_marginals();
            let col = w.col_marginals();
            let mut res_y: f64 = 0.0;
            let mut res_z: f64 = 0.0;
            for k in 0..2 {
                res_y = res_y.max(max_abs_diff(&row[k], qubit::pvm_y().projector(k)));
                res_z = res_z.max(max_abs_diff(&col[k], qubit::pvm_z().projector(k)));
            }
            let min_eig = w.min_eigenvalue();
            Some(WignerBlock {
                lambda: StochasticFile::from_matrix(&lam),
                mu: StochasticFile::from_matrix(&mu),
                lambda_condition: lam_inv.condition,
                mu_condition: mu_inv.condition,
                lambda_fit_residual: lam_res,
                mu_fit_residual: mu_res,
                marginal_identity_residual_y: res_y,
                marginal_identity_residual_z: res_z,
                min_wigner_eigenvalue: min_eig,
                negativity_found: min_eig < -1e-8,
            })
        } else {
            None
        };

        return Ok(TomographyReport {
            command: "tomography",
            config,
            input_digest: digest,
            effects: EffectsJson::from_set(&flat_effects),
            condition: info.condition,
            min_effect_eigenvalue: info.min_eigenvalue,
            completeness_defect: info.completeness_defect,
            identity_deviation_max: None,
            no_information_transfer: false,
            lambda: Some(StochasticFile::from_matrix(&lam)),
            lambda_fit_residual: Some(lam_res.max(mu_res)),
            row_entropy_j: Some(row_entropy_j(&lam) + row_entropy_j(&mu)),
            wigner,
            quorum: None,
        });
    }

    if args.wigner {
        return Err(anyhow!("--wigner needs --sg-variant quadrupole"));
    }
    let (effects, info) = extract_effects_with(&params, &tol)?;
    let (lam, lam_res) = nonideality_matrix(&effects, &qubit::pvm_z())?;
    Ok(TomographyReport {
        command: "tomography",
        config,
        input_digest: digest,
        no_information_transfer: MeasurementModel::is_no_information_transfer(&effects, 1e-8),
        effects: EffectsJson::from_set(&effects),
        condition: info.condition,
        min_effect_eigenvalue: info.min_eigenvalue,
        completeness_defect: info.completeness_defect,
        identity_deviation_max: None,
        lambda: Some(StochasticFile::from_matrix(&lam)),
        lambda_fit_residual: Some(lam_res),
        row_entropy_j: Some(row_entropy_j(&lam)),
        wigner: None,
        quorum: None,
    })
}

fn quorum_block(args: &TomographyArgs) -> Result<Option<QuorumBlock>> {
    let Some(spin_name) = &args.quorum_spin else {
        return Ok(None);
    };
    let spin = parse_spin(spin_name)?;
    let rho_true = DensityOperator::pure(&spin)?;
    let pvms = [qubit::pvm_x(), qubit::pvm_y(), qubit::pvm_z()];
    let mut measurements: Vec<(ProjectiveMeasure, ProbabilityRecord)> = Vec::new();
    for (idx, pvm) in pvms.iter().enumerate() {
        let exact: Vec<f64> = pvm
            .projectors()
            .iter()
            .map(|e| rho_true.expectation(e))
            .collect();
        let record = ProbabilityRecord::new(pvm.labels().to_vec(), exact)?;
        let record = match args.quorum_samples {
            Some(n) => {
                let counts =
                    measim_core::sampling::sample_outcomes(&record, n, args.seed + idx as u64)?;
                ProbabilityRecord::new(pvm.labels().to_vec(), counts.frequencies())?
            }
            None => record,
        };
        measurements.push((pvm.clone(), record));
    }
    let rec = quorum_reconstruct(&measurements, &Tolerances::default())?;
    let raw_min = rec
        .least_squares
        .min_eigenvalue(1e-8)
        .unwrap_or(f64::NAN);
    Ok(Some(QuorumBlock {
        spin: spin_name.clone(),
        samples: args.quorum_samples,
        recovered: matrix_to_json(rec.rho.op()),
        max_error_vs_true: max_abs_diff(rec.rho.op(), rho_true.op()),
        residual: rec.residual,
        projection_distance: rec.projection_distance,
        condition: rec.condition,
        negative_raw_eigenvalue: raw_min < 0.0,
    }))
}
