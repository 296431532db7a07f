//! Pointer readout and the measurement-theoretic layer over the grid
//! engine: momentum-sign binning, eigenstate calibration, detector
//! tomography of the effective spin POVM, conserved-quantity residuals and
//! the ∇·B consistency check.

use num_complex::Complex64 as C64;

use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::measure::{BivariateEffectSet, EffectSet, JointProbabilities, ProbabilityRecord};
use crate::nonideality::StochasticMatrix;
use crate::qubit;
use crate::tolerances::Tolerances;
use crate::tomography::{reconstruct_effects, ReconstructionInfo};

use super::{build_initial_state, evolve_sg, generic_spin, GridState, SgParams, SgVariant};

pub const BIN_UP: &str = "pz+";
pub const BIN_DOWN: &str = "pz-";
pub const BIN_Y_UP: &str = "py+";
pub const BIN_Y_DOWN: &str = "py-";

fn univariate_labels() -> Vec<String> {
    vec![BIN_UP.into(), BIN_DOWN.into()]
}

/// Sign-of-P_z bin masses; the zero-momentum line is split half/half
/// between the two bins. For the quadrupole variant the four joint bins
/// are returned flattened in row-major (p_y sign, p_z sign) order.
pub fn readout_momentum_bins(state: &GridState, variant: SgVariant) -> Result<ProbabilityRecord> {
    match variant {
        SgVariant::Quadrupole => readout_joint_bins(state)?.flatten(&Tolerances::default()),
        _ => {
            let n = state.n();
            let dens = state.momentum_density();
            let mut up = 0.0;
            for jy in 0..n {
                for jz in 0..n {
                    let pz = state.momentum(jz);
                    let d = dens[jy * n + jz];
                    if pz > 0.0 {
                        up += d;
                    } else if pz == 0.0 {
                        up += 0.5 * d;
                    }
                }
            }
            ProbabilityRecord::new(univariate_labels(), vec![up, 1.0 - up])
        }
    }
}

/// Joint (sign P_y, sign P_z) bin masses as a 2×2 table; zero-momentum
/// lines are split half/half on each axis independently.
pub fn readout_joint_bins(state: &GridState) -> Result<JointProbabilities> {
    let n = state.n();
    let dens = state.momentum_density();
    let mut table = [0.0f64; 4];
    for jy in 0..n {
        let py = state.momentum(jy);
        let wy = if py > 0.0 {
            1.0
        } else if py == 0.0 {
            0.5
        } else {
            0.0
        };
        for jz in 0..n {
            let pz = state.momentum(jz);
            let wz = if pz > 0.0 {
                1.0
            } else if pz == 0.0 {
                0.5
            } else {
                0.0
            };
            let d = dens[jy * n + jz];
            table[0] += d * wy * wz;
            table[1] += d * wy * (1.0 - wz);
            table[2] += d * (1.0 - wy) * wz;
            table[3] += d * (1.0 - wy) * (1.0 - wz);
        }
    }
    JointProbabilities::new(
        vec![BIN_Y_UP.into(), BIN_Y_DOWN.into()],
        vec![BIN_UP.into(), BIN_DOWN.into()],
        table.to_vec(),
    )
}

fn run_spin(params: &SgParams, spin: &nalgebra::DVector<C64>) -> Result<GridState> {
    let state = build_initial_state(params, spin)?;
    evolve_sg(&state, params)
}

/// Calibration against σ_z eigenstate inputs: column k' of λ is the bin
/// distribution produced by ∣z_k'⟩. Univariate variants only.
pub fn calibrate(params: &SgParams) -> Result<StochasticMatrix> {
    calibrate_with(params, &Tolerances::grid_extracted())
}

/// [`calibrate`] with caller-supplied validation tolerances.
pub fn calibrate_with(params: &SgParams, tol: &Tolerances) -> Result<StochasticMatrix> {
    if params.variant == SgVariant::Quadrupole {
        return Err(Error::InvalidParams(
            "calibration columns are σ_z eigenstates; use the univariate variants".into(),
        ));
    }
    let plus = readout_momentum_bins(&run_spin(params, &qubit::ket_z_plus())?, params.variant)?;
    let minus = readout_momentum_bins(&run_spin(params, &qubit::ket_z_minus())?, params.variant)?;
    let rows = vec![
        vec![plus.get(0), minus.get(0)],
        vec![plus.get(1), minus.get(1)],
    ];
    StochasticMatrix::with_tolerances(rows, univariate_labels(), vec!["+".into(), "-".into()], tol)
}

fn tomography_probes() -> [(nalgebra::DVector<C64>, DensityOperator); 4] {
    let kets = [
        qubit::ket_z_plus(),
        qubit::ket_z_minus(),
        qubit::ket_x_plus(),
        qubit::ket_y_plus(),
    ];
    kets.map(|k| {
        let rho = DensityOperator::pure(&k).expect("unit ket");
        (k, rho)
    })
}

/// Detector tomography of the univariate pointer: the effective 2×2 spin
/// effects {M_k} reproducing the bin statistics on every input spin state.
pub fn extract_effects(params: &SgParams) -> Result<(EffectSet, ReconstructionInfo)> {
    extract_effects_with(params, &Tolerances::grid_extracted())
}

/// [`extract_effects`] with caller-supplied validation tolerances.
pub fn extract_effects_with(
    params: &SgParams,
    tol: &Tolerances,
) -> Result<(EffectSet, ReconstructionInfo)> {
    if params.variant == SgVariant::Quadrupole {
        return Err(Error::InvalidParams(
            "quadrupole readout is bivariate; use extract_bivariate_effects".into(),
        ));
    }
    let probes = tomography_probes();
    let mut records = Vec::with_capacity(4);
    for (ket, _) in &probes {
        records.push(readout_momentum_bins(&run_spin(params, ket)?, params.variant)?);
    }
    let states: Vec<DensityOperator> = probes.iter().map(|(_, rho)| rho.clone()).collect();
    let (effects, info) = reconstruct_effects(2, &states, &records, tol)?;
    let set = EffectSet::with_tolerances(effects, univariate_labels(), tol)?;
    Ok((set, info))
}

/// Bivariate detector tomography for the quadrupole readout: the 2×2 grid
/// of effects {M_kℓ} over (sign P_y, sign P_z).
pub fn extract_bivariate_effects(
    params: &SgParams,
) -> Result<(BivariateEffectSet, ReconstructionInfo)> {
    extract_bivariate_effects_with(params, &Tolerances::grid_extracted())
}

/// [`extract_bivariate_effects`] with caller-supplied validation tolerances.
pub fn extract_bivariate_effects_with(
    params: &SgParams,
    tol: &Tolerances,
) -> Result<(BivariateEffectSet, ReconstructionInfo)> {
    if params.variant != SgVariant::Quadrupole {
        return Err(Error::InvalidParams(
            "bivariate extraction needs the quadrupole variant".into(),
        ));
    }
    let probes = tomography_probes();
    let mut records = Vec::with_capacity(4);
    for (ket, _) in &probes {
        let joint = readout_joint_bins(&run_spin(params, ket)?)?;
        records.push(joint.flatten(tol)?);
    }
    let states: Vec<DensityOperator> = probes.iter().map(|(_, rho)| rho.clone()).collect();
    let (effects, info) = reconstruct_effects(2, &states, &records, tol)?;
    let grid = vec![
        vec![effects[0].clone(), effects[1].clone()],
        vec![effects[2].clone(), effects[3].clone()],
    ];
    let set = BivariateEffectSet::new(
        grid,
        vec![BIN_Y_UP.into(), BIN_Y_DOWN.into()],
        vec![BIN_UP.into(), BIN_DOWN.into()],
        tol,
    )?;
    Ok((set, info))
}

/// Observables whose conservation classifies the variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConservedObservable {
    SigmaZ,
    /// L_x − σ_x/2 with L_x = Y P_z − Z P_y on the grid.
    LxMinusHalfSigmaX,
}

impl std::str::FromStr for ConservedObservable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma_z" => Ok(ConservedObservable::SigmaZ),
            "lx_minus_half_sigma_x" => Ok(ConservedObservable::LxMinusHalfSigmaX),
            other => Err(Error::InvalidParams(format!("unknown observable '{other}'"))),
        }
    }
}

fn observable_value(state: &GridState, obs: ConservedObservable) -> f64 {
    match obs {
        ConservedObservable::SigmaZ => state.sigma_expectations()[2],
        ConservedObservable::LxMinusHalfSigmaX => {
            state.mean_orbital_lx() - 0.5 * state.sigma_expectations()[0]
        }
    }
}

/// |⟨O⟩(τ) − ⟨O⟩(0)| for the generic reference spin input.
pub fn conserved_quantity_residual(params: &SgParams, obs: ConservedObservable) -> Result<f64> {
    let initial = build_initial_state(params, &generic_spin())?;
    let v0 = observable_value(&initial, obs);
    let final_state = evolve_sg(&initial, params)?;
    let v1 = observable_value(&final_state, obs);
    Ok((v1 - v0).abs())
}

/// Analytic divergence of the modeled (μ-scaled) field term. The ideal
/// single-component field violates ∇·B = 0 by −(μ/2)b; the corrected and
/// quadrupole fields are divergence-free.
pub fn field_divergence_check(variant: SgVariant, params: &SgParams) -> f64 {
    match variant {
        SgVariant::Ideal => -(params.mu / 2.0) * params.b,
        SgVariant::Corrected | SgVariant::Quadrupole => 0.0,
    }
}
