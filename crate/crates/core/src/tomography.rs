//! Detector tomography: reconstruct the effective object-side effects from
//! pointer statistics over an informationally complete family of input
//! states. Shared by the abstract premeasurement module and the
//! Stern-Gerlach grid pipeline.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::measure::ProbabilityRecord;
use crate::operator::{hermitian_basis, Operator};
use crate::qubit;
use crate::tolerances::Tolerances;

/// The default informationally complete probe family for object dimension
/// `dim`: the d² pure "standard Hermitian basis states" — ∣i⟩⟨i∣ plus, for
/// each pair i<j, the states (∣i⟩+∣j⟩)/√2 and (∣i⟩+i∣j⟩)/√2. For a qubit
/// this is exactly {∣z+⟩, ∣z−⟩, ∣x+⟩, ∣y+⟩}.
pub fn standard_probe_states(dim: usize) -> Vec<DensityOperator> {
    if dim == 2 {
        return vec![
            DensityOperator::pure(&qubit::ket_z_plus()).expect("unit ket"),
            DensityOperator::pure(&qubit::ket_z_minus()).expect("unit ket"),
            DensityOperator::pure(&qubit::ket_x_plus()).expect("unit ket"),
            DensityOperator::pure(&qubit::ket_y_plus()).expect("unit ket"),
        ];
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut probes = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        let mut v = nalgebra::DVector::zeros(dim);
        v[i] = C64::new(1.0, 0.0);
        probes.push(DensityOperator::pure(&v).expect("unit ket"));
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut v = nalgebra::DVector::zeros(dim);
            v[i] = C64::new(s, 0.0);
            v[j] = C64::new(s, 0.0);
            probes.push(DensityOperator::pure(&v).expect("unit ket"));
            let mut w = nalgebra::DVector::zeros(dim);
            w[i] = C64::new(s, 0.0);
            w[j] = C64::new(0.0, s);
            probes.push(DensityOperator::pure(&w).expect("unit ket"));
        }
    }
    probes
}

/// Diagnostics carried alongside a reconstructed effect family.
#[derive(Debug, Clone)]
pub struct ReconstructionInfo {
    /// Condition number of the probe design matrix.
    pub condition: f64,
    /// Smallest eigenvalue over all reconstructed effects.
    pub min_eigenvalue: f64,
    /// ‖ΣM_k − I‖_max of the reconstructed family.
    pub completeness_defect: f64,
}

/// Solve Tr(ρ_s M_k) = p_s(k) for every outcome k. `records[s]` are the
/// outcome probabilities under probe `probes[s]`; all records share labels.
///
/// Errors with [`Error::IllConditionedProbes`] when the probe family's
/// design matrix has condition number above `tol.probe_condition`.
pub fn reconstruct_effects(
    dim: usize,
    probes: &[DensityOperator],
    records: &[ProbabilityRecord],
    tol: &Tolerances,
) -> Result<(Vec<Operator>, ReconstructionInfo)> {
    let n_par = dim * dim;
    if probes.len() < n_par {
        return Err(Error::InvalidParams(format!(
            "{} probes cannot determine {} effect parameters",
            probes.len(),
            n_par
        )));
    }
    if probes.len() != records.len() {
        return Err(Error::InvalidParams(format!(
            "{} probes vs {} probability records",
            probes.len(),
            records.len()
        )));
    }
    let outcomes = records[0].len();
    if records.iter().any(|r| r.len() != outcomes) {
        return Err(Error::InvalidProbabilities(
            "probe records disagree on outcome count".into(),
        ));
    }
    let basis = hermitian_basis(dim);
    // Design matrix A_sj = Tr(ρ_s B_j); real because both are Hermitian.
    let a = DMatrix::from_fn(probes.len(), n_par, |s, j| probes[s].expectation(&basis[j]));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > tol.probe_condition {
        return Err(Error::IllConditionedProbes(condition));
    }

    let mut effects = Vec::with_capacity(outcomes);
    for k in 0..outcomes {
        let b = nalgebra::DVector::from_fn(probes.len(), |s, _| records[s].get(k));
        let x = svd
            .solve(&b, 0.0)
            .map_err(|e| Error::Numerical(format!("probe solve: {e}")))?;
        let mut m = Operator::zeros(dim);
        for (j, bj) in basis.iter().enumerate() {
            m = &m + &bj.scaled(C64::new(x[j], 0.0));
        }
        effects.push(m);
    }

    let mut sum = Operator::zeros(dim);
    let mut min_eig = f64::INFINITY;
    for m in &effects {
        sum = &sum + m;
        min_eig = min_eig.min(m.min_eigenvalue(tol.matrix)?);
    }
    let completeness_defect =
        crate::operator::max_abs_diff(&sum, &Operator::identity(dim));
    Ok((
        effects,
        ReconstructionInfo {
            condition,
            min_eigenvalue: min_eig,
            completeness_defect,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_probes_match_general_recipe_span() {
        let probes = standard_probe_states(2);
        assert_eq!(probes.len(), 4);
        let probes3 = standard_probe_states(3);
        assert_eq!(probes3.len(), 9);
    }

    #[test]
    fn known_effects_are_recovered_exactly() {
        let mut rng = crate::random::rng(41, 0);
        for dim in [2usize, 3] {
            let set = crate::random::effect_set(&mut rng, dim, 3);
            let probes = standard_probe_states(dim);
            let records: Vec<ProbabilityRecord> = probes
                .iter()
                .map(|rho| {
                    let probs: Vec<f64> =
                        set.effects().iter().map(|m| rho.expectation(m)).collect();
                    ProbabilityRecord::with_tolerances(
                        set.labels().to_vec(),
                        probs,
                        &Tolerances::default(),
                    )
                    .unwrap()
                })
                .collect();
            let (effects, info) =
                reconstruct_effects(dim, &probes, &records, &Tolerances::default()).unwrap();
            for (m, orig) in effects.iter().zip(set.effects()) {
                assert!(crate::operator::max_abs_diff(m, orig) < 1e-10);
            }
            assert!(info.condition < 20.0);
            assert!(info.completeness_defect < 1e-10);
        }
    }

    #[test]
    fn degenerate_probe_family_is_rejected() {
        // four copies of the same state cannot span the qubit effect space
        let rho = DensityOperator::pure(&qubit::ket_z_plus()).unwrap();
        let probes = vec![rho.clone(), rho.clone(), rho.clone(), rho];
        let rec = ProbabilityRecord::new(vec!["+".into(), "-".into()], vec![1.0, 0.0]).unwrap();
        let records = vec![rec.clone(), rec.clone(), rec.clone(), rec];
        assert!(matches!(
            reconstruct_effects(2, &probes, &records, &Tolerances::default()),
            Err(Error::IllConditionedProbes(_))
        ));
    }
}
