//! `measim inequalities` — Martens, generalized-Martens and Robertson
//! reports, fed either by the quadrupole Stern-Gerlach pipeline or by
//! explicit PVM / stochastic-matrix / density files.

use anyhow::{anyhow, Result};
use clap::Args;
use serde::Serialize;
use std::path::PathBuf;

use measim_core::nonideality::{
    check_martens, nonideality_matrix, robertson_bound, total_uncertainty, MartensReport,
    UncertaintyReport,
};
use measim_core::sterngerlach::{extract_bivariate_effects_with, SgVariant};
use measim_core::{qubit, DensityOperator};

use crate::commands::sg::SgFlags;
use crate::output::{config_digest, write_json_report};
use crate::schema::{load_density, parse_spin, PvmFile, StochasticFile};
use crate::Ctx;

#[derive(Args)]
pub struct InequalitiesArgs {
    /// Drive the report from the quadrupole Stern-Gerlach pipeline.
    #[arg(long)]
    pub sg_quadrupole: bool,
    #[command(flatten)]
    pub sg: SgFlags,
    /// PVM file for the first observable (explicit mode).
    #[arg(long, requires = "pvm_f")]
    pub pvm_e: Option<PathBuf>,
    /// PVM file for the second observable (explicit mode).
    #[arg(long)]
    pub pvm_f: Option<PathBuf>,
    /// Nonideality matrix file for the first observable; identity if
    /// omitted.
    #[arg(long)]
    pub lambda_file: Option<PathBuf>,
    /// Nonideality matrix file for the second observable; identity if
    /// omitted.
    #[arg(long)]
    pub mu_file: Option<PathBuf>,
    /// Density-operator file for the preparation-entropy term; maximally
    /// mixed if omitted.
    #[arg(long)]
    pub rho: Option<PathBuf>,
    /// Qubit state for the Robertson inequality block.
    #[arg(long, default_value = "x+")]
    pub state: String,
}

#[derive(Serialize)]
struct InequalitiesConfig {
    mode: String,
    sg_params: Option<measim_core::SgParams>,
    pvm_e: Option<String>,
    pvm_f: Option<String>,
    lambda_file: Option<String>,
    mu_file: Option<String>,
    rho: Option<String>,
    state: String,
}

#[derive(Serialize)]
struct RobertsonBlock {
    a: &'static str,
    b: &'static str,
    state: String,
    lhs: f64,
    rhs: f64,
    satisfied: bool,
    slack: f64,
}

#[derive(Serialize)]
struct InequalitiesReport {
    command: &'static str,
    config: InequalitiesConfig,
    input_digest: String,
    martens: MartensReport,
    generalized_martens: UncertaintyReport,
    robertson: Option<RobertsonBlock>,
}

pub fn run(ctx: &Ctx, args: InequalitiesArgs) -> Result<()> {
    let report = if args.sg_quadrupole {
        quadrupole_report(&args)?
    } else {
        explicit_report(&args)?
    };
    write_json_report(ctx, "inequalities-report.json", &report)
}

fn build_config(
    args: &InequalitiesArgs,
    mode: &str,
    sg_params: Option<measim_core::SgParams>,
) -> InequalitiesConfig {
    let path_str = |p: &Option<PathBuf>| p.as_ref().map(|v| v.display().to_string());
    InequalitiesConfig {
        mode: mode.to_string(),
        sg_params,
        pvm_e: path_str(&args.pvm_e),
        pvm_f: path_str(&args.pvm_f),
        lambda_file: path_str(&args.lambda_file),
        mu_file: path_str(&args.mu_file),
        rho: path_str(&args.rho),
        state: args.state.clone(),
    }
}

fn quadrupole_report(args: &InequalitiesArgs) -> Result<InequalitiesReport> {
    let mut params = args.sg.resolve()?;
    params.variant = SgVariant::Quadrupole;
    let tol = args.sg.resolve_tolerances()?;
    let (biv, _) = extract_bivariate_effects_with(&params, &tol)?;
    let (lam, _) = nonideality_matrix(&biv.row_marginals(&tol)?, &qubit::pvm_y())?;
    let (mu, _) = nonideality_matrix(&biv.col_marginals(&tol)?, &qubit::pvm_z())?;
    let martens = check_martens(&lam, &mu, &qubit::pvm_y(), &qubit::pvm_z())?;

    let rho = match &args.rho {
        Some(path) => load_density(path)?,
        None => DensityOperator::maximally_mixed(2),
    };
    let generalized = total_uncertainty(&rho, &lam, Some(&mu));
    let config = build_config(args, "sg:quadrupole", Some(params));
    Ok(InequalitiesReport {
        command: "inequalities",
        input_digest: config_digest(&config),
        config,
        martens,
        generalized_martens: generalized,
        robertson: robertson_block(&args.state)?,
    })
}

fn explicit_report(args: &InequalitiesArgs) -> Result<InequalitiesReport> {
    let (Some(pvm_e_path), Some(pvm_f_path)) = (&args.pvm_e, &args.pvm_f) else {
        return Err(anyhow!(
            "explicit mode needs --pvm-e and --pvm-f (or use --sg-quadrupole)"
        ));
    };
    let pvm_e = PvmFile::load(pvm_e_path)?;
    let pvm_f = PvmFile::load(pvm_f_path)?;
    let lam = match &args.lambda_file {
        Some(path) => StochasticFile::load(path)?,
        None => measim_core::StochasticMatrix::identity(pvm_e.labels().to_vec()),
    };
    let mu = match &args.mu_file {
        Some(path) => StochasticFile::load(path)?,
        None => measim_core::StochasticMatrix::identity(pvm_f.labels().to_vec()),
    };
    let martens = check_martens(&lam, &mu, &pvm_e, &pvm_f)?;
    let rho = match &args.rho {
        Some(path) => load_density(path)?,
        None => DensityOperator::maximally_mixed(pvm_e.dim()),
    };
    let generalized = total_uncertainty(&rho, &lam, Some(&mu));
    let robertson = if pvm_e.dim() == 2 {
        robertson_block(&args.state)?
    } else {
        None
    };
    let config = build_config(args, "explicit", None);
    Ok(InequalitiesReport {
        command: "inequalities",
        input_digest: config_digest(&config),
        config,
        martens,
        generalized_martens: generalized,
        robertson,
    })
}

fn robertson_block(state: &str) -> Result<Option<RobertsonBlock>> {
    let psi = parse_spin(state)?;
    let (lhs, rhs) = robertson_bound(&qubit::sigma_y(), &qubit::sigma_z(), &psi)?;
    Ok(Some(RobertsonBlock {
        a: "sigma_y",
        b: "sigma_z",
        state: state.to_string(),
        lhs,
        rhs,
        satisfied: lhs >= rhs - 1e-10,
        slack: lhs - rhs,
    }))
}
