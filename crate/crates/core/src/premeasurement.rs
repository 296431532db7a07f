//! The four-phase measurement scheme at the finite-dimensional level: a
//! premeasurement unitary entangles object and ancilla, the pointer NODI is
//! read on the ancilla, and detector tomography recovers the effective
//! object-side POVM {M_k(T)} that reproduces the pointer statistics on every
//! input state.

use num_complex::Complex64 as C64;

use crate::density::{evolve_unitary, partial_trace, DensityOperator, Subsystem};
use crate::error::{Error, Result};
use crate::measure::{EffectSet, ProbabilityRecord};
use crate::operator::Operator;
use crate::qubit;
use crate::tolerances::Tolerances;
use crate::tomography::{reconstruct_effects, standard_probe_states, ReconstructionInfo};

/// How the premeasurement coupling is supplied.
#[derive(Debug, Clone)]
pub enum Interaction {
    /// H_(oa) exponentiated over the interaction time, U = exp(−iHT).
    Hamiltonian { hamiltonian: Operator, time: f64 },
    /// The interaction unitary U_(oa)(T) given directly.
    Unitary(Operator),
}

/// A complete premeasurement model: dimensions, coupling, the ancilla's
/// initial state and its pointer NODI.
#[derive(Debug, Clone)]
pub struct MeasurementModel {
    object_dim: usize,
    ancilla_dim: usize,
    interaction: Interaction,
    ancilla_init: DensityOperator,
    pointer: EffectSet,
    /// Resolved propagator; equals the explicit unitary or exp(−iHT).
    unitary: Operator,
}

impl MeasurementModel {
    pub fn new(
        object_dim: usize,
        ancilla_dim: usize,
        interaction: Interaction,
        ancilla_init: DensityOperator,
        pointer: EffectSet,
    ) -> Result<Self> {
        let tol = Tolerances::default();
        if object_dim == 0 || ancilla_dim == 0 {
            return Err(Error::InvalidParams("dimensions must be positive".into()));
        }
        if ancilla_init.dim() != ancilla_dim {
            return Err(Error::DimensionMismatch(format!(
                "ancilla state has dim {}, expected {ancilla_dim}",
                ancilla_init.dim()
            )));
        }
        if pointer.dim() != ancilla_dim {
            return Err(Error::DimensionMismatch(format!(
                "pointer NODI acts on dim {}, expected {ancilla_dim}",
                pointer.dim()
            )));
        }
        let joint = object_dim * ancilla_dim;
        let unitary = match &interaction {
            Interaction::Hamiltonian { hamiltonian, time } => {
                if hamiltonian.dim() != joint {
                    return Err(Error::DimensionMismatch(format!(
                        "Hamiltonian dim {} vs object⊗ancilla dim {joint}",
                        hamiltonian.dim()
                    )));
                }
                hamiltonian.expi(*time, tol.matrix)?
            }
            Interaction::Unitary(u) => {
                if u.dim() != joint {
                    return Err(Error::DimensionMismatch(format!(
                        "unitary dim {} vs object⊗ancilla dim {joint}",
                        u.dim()
                    )));
                }
                let defect = u.unitarity_defect();
                if defect > tol.matrix {
                    return Err(Error::NotUnitary {
                        defect,
                        tolerance: tol.matrix,
                    });
                }
                u.clone()
            }
        };
        Ok(Self {
            object_dim,
            ancilla_dim,
            interaction,
            ancilla_init,
            pointer,
            unitary,
        })
    }

    pub fn object_dim(&self) -> usize {
        self.object_dim
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn interaction(&self) -> &Interaction {
        &self.interaction
    }

    pub fn ancilla_init(&self) -> &DensityOperator {
        &self.ancilla_init
    }

    pub fn pointer(&self) -> &EffectSet {
        &self.pointer
    }

    pub fn unitary(&self) -> &Operator {
        &self.unitary
    }

    /// Qubit⊗qubit demo: the object basis controls an ancilla bit flip
    /// (CNOT), ancilla starts in ∣0⟩, pointer is the computational PVM.
    /// The ideal premeasurement: the extracted POVM is the computational
    /// PVM itself.
    pub fn controlled_flip() -> Self {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let cnot = Operator::from_rows(
            4,
            &[
                o, z, z, z, //
                z, o, z, z, //
                z, z, z, o, //
                z, z, o, z,
            ],
        )
        .expect("static matrix");
        Self::new(
            2,
            2,
            Interaction::Unitary(cnot),
            DensityOperator::pure(&qubit::ket_z_plus()).expect("unit ket"),
            EffectSet::from_pvm(&qubit::pvm_z()),
        )
        .expect("static model")
    }

    /// Qubit⊗qubit demo with U = I: no coupling, so the pointer statistics
    /// carry no information about the object.
    pub fn identity_demo() -> Self {
        Self::new(
            2,
            2,
            Interaction::Unitary(Operator::identity(4)),
            DensityOperator::pure(&qubit::ket_z_plus()).expect("unit ket"),
            EffectSet::from_pvm(&qubit::pvm_z()),
        )
        .expect("static model")
    }

    /// ρ_(oa)(T) = U (ρ_o ⊗ ρ_a(0)) U†.
    pub fn apply_premeasurement(&self, rho_o: &DensityOperator) -> Result<DensityOperator> {
        if rho_o.dim() != self.object_dim {
            return Err(Error::DimensionMismatch(format!(
                "object state dim {} vs model object dim {}",
                rho_o.dim(),
                self.object_dim
            )));
        }
        let joint = DensityOperator::new(rho_o.op().tensor(self.ancilla_init.op()))?;
        evolve_unitary(&joint, &self.unitary)
    }

    /// p_k(T) = Tr_a(ρ_a(T) M_k) with ρ_a(T) = Tr_o ρ_(oa)(T).
    pub fn pointer_probabilities(&self, rho_o: &DensityOperator) -> Result<ProbabilityRecord> {
        let joint = self.apply_premeasurement(rho_o)?;
        let rho_a = partial_trace(
            &joint,
            (self.object_dim, self.ancilla_dim),
            Subsystem::Ancilla,
        )?;
        let probs: Vec<f64> = self
            .pointer
            .effects()
            .iter()
            .map(|m| rho_a.expectation(m))
            .collect();
        ProbabilityRecord::new(self.pointer.labels().to_vec(), probs)
    }

    /// Detector tomography over the standard probe family: the effective
    /// object-side POVM {M_k(T)} with Tr(ρ M_k(T)) equal to the pointer
    /// probabilities for every ρ.
    pub fn extract_effective_povm(&self) -> Result<EffectSet> {
        Ok(self.extract_effective_povm_detailed()?.0)
    }

    /// Like [`extract_effective_povm`](Self::extract_effective_povm) but
    /// keeps the reconstruction diagnostics (condition number, smallest
    /// effect eigenvalue, completeness defect).
    pub fn extract_effective_povm_detailed(&self) -> Result<(EffectSet, ReconstructionInfo)> {
        let probes = standard_probe_states(self.object_dim);
        self.extract_effective_povm_with(&probes)
    }

    /// Tomography against a caller-supplied informationally complete probe
    /// family. Extraction is linear, so any complete family yields the same
    /// effects up to solver roundoff.
    pub fn extract_effective_povm_with(
        &self,
        probes: &[DensityOperator],
    ) -> Result<(EffectSet, ReconstructionInfo)> {
        let tol = Tolerances::default();
        let records: Result<Vec<ProbabilityRecord>> = probes
            .iter()
            .map(|rho| self.pointer_probabilities(rho))
            .collect();
        let records = records?;
        let (effects, info) =
            reconstruct_effects(self.object_dim, probes, &records, &tol)?;
        let set = EffectSet::with_tolerances(
            effects,
            self.pointer.labels().to_vec(),
            &Tolerances::extracted(),
        )?;
        Ok((set, info))
    }

    /// Max_k |p_(a)k(T) − Tr(ρ_o M_k(T))|, the numerical-equality check
    /// between pointer statistics and the extracted object-side POVM.
    pub fn check_probability_identity(&self, rho_o: &DensityOperator) -> Result<f64> {
        let effects = self.extract_effective_povm()?;
        self.check_probability_identity_against(rho_o, &effects)
    }

    /// The same check against a previously extracted effect set.
    pub fn check_probability_identity_against(
        &self,
        rho_o: &DensityOperator,
        effects: &EffectSet,
    ) -> Result<f64> {
        let pointer = self.pointer_probabilities(rho_o)?;
        if effects.len() != pointer.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} effects vs {} pointer outcomes",
                effects.len(),
                pointer.len()
            )));
        }
        let mut max_dev: f64 = 0.0;
        for (k, m) in effects.effects().iter().enumerate() {
            let dev = (pointer.get(k) - rho_o.expectation(m)).abs();
            max_dev = max_dev.max(dev);
        }
        Ok(max_dev)
    }

    /// True when every effect is a multiple of the identity, i.e. the
    /// measurement statistics are independent of the object state.
    pub fn is_no_information_transfer(effects: &EffectSet, tol: f64) -> bool {
        effects.effects().iter().all(|m| {
            let scale = m.trace().re / m.dim() as f64;
            let id_part = Operator::identity(m.dim()).scaled(C64::new(scale, 0.0));
            crate::operator::max_abs_diff(m, &id_part) <= tol
        })
    }
}

/// A joint nonideal measurement of the incompatible pair (σ_y, σ_z) built
/// from two qubit probes: the object's σ_y conditionally rotates probe 1 by
/// ±θ_y about its own y axis, then σ_z rotates probe 2 by ±θ_z, and each
/// probe is read in its x basis. Because the couplings act in sequence, the
/// pointer marginals are exactly λ- resp. μ-mixtures of the σ_y and σ_z
/// eigenprojectors (the second coupling dephases the first observable but
/// leaves its record untouched).
pub fn two_probe_qubit_model(theta_y: f64, theta_z: f64) -> Result<MeasurementModel> {
    let tol = Tolerances::default();
    let half = C64::new(0.5, 0.0);
    let g1 = qubit::sigma_y().scaled(half * theta_y);
    let g2 = qubit::sigma_y().scaled(half * theta_z);
    let u1 = qubit::sigma_y()
        .tensor(&g1)
        .tensor(&Operator::identity(2))
        .expi(1.0, tol.matrix)?;
    let u2 = qubit::sigma_z()
        .tensor(&Operator::identity(2))
        .tensor(&g2)
        .expi(1.0, tol.matrix)?;
    let u = &u2 * &u1;

    // both probes start in |0⟩
    let mut anc_ket = nalgebra::DVector::zeros(4);
    anc_ket[0] = C64::new(1.0, 0.0);
    let anc0 = DensityOperator::pure(&anc_ket)?;

    let px = [
        Operator::outer(&qubit::ket_x_plus()),
        Operator::outer(&qubit::ket_x_minus()),
    ];
    let signs = ["+", "-"];
    let mut projectors = Vec::new();
    let mut labels = Vec::new();
    for (i, p1) in px.iter().enumerate() {
        for (j, p2) in px.iter().enumerate() {
            projectors.push(p1.tensor(p2));
            labels.push(format!("{}{}", signs[i], signs[j]));
        }
    }
    let pointer = EffectSet::new(projectors, labels)?;
    MeasurementModel::new(2, 4, Interaction::Unitary(u), anc0, pointer)
}

/// Regroup a model's flat pointer outcomes (row-major, `rows`×`cols`) into a
/// bivariate effect grid on the object space via detector tomography.
pub fn extract_bivariate_effects(
    model: &MeasurementModel,
    rows: usize,
    cols: usize,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
) -> Result<crate::measure::BivariateEffectSet> {
    let set = model.extract_effective_povm()?;
    if set.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "{} pointer outcomes cannot form a {rows}x{cols} grid",
            set.len()
        )));
    }
    let grid: Vec<Vec<Operator>> = (0..rows)
        .map(|k| (0..cols).map(|l| set.effect(k * cols + l).clone()).collect())
        .collect();
    crate::measure::BivariateEffectSet::new(
        grid,
        row_labels,
        col_labels,
        &Tolerances::extracted(),
    )
}
