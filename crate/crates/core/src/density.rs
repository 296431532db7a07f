//! Density operators and their unitary dynamics: ρ(T) = U ρ(0) U† with
//! U = exp(−iHT/ħ), ħ = 1 throughout.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::tolerances::Tolerances;

/// A trace-one, Hermitian, positive-semidefinite operator. Every constructor
/// runs the same validator, so a `DensityOperator` obtained from any path in
/// this crate satisfies the three invariants within [`Tolerances`].
#[derive(Debug, Clone)]
pub struct DensityOperator {
    op: Operator,
}

impl DensityOperator {
    pub fn new(op: Operator) -> Result<Self> {
        Self::with_tolerances(op, &Tolerances::default())
    }

    pub fn with_tolerances(op: Operator, tol: &Tolerances) -> Result<Self> {
        let defect = op.hermiticity_defect();
        if defect > tol.matrix {
            return Err(Error::InvalidDensity(format!(
                "Hermiticity defect {defect:.3e}"
            )));
        }
        let trace = op.trace();
        if (trace.re - 1.0).abs() > tol.matrix || trace.im.abs() > tol.matrix {
            return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
        }
        let min = op.min_eigenvalue(tol.matrix)?;
        if min < -tol.positivity {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { op })
    }

    /// |ψ⟩⟨ψ| for a normalized state vector.
    pub fn pure(state: &DVector<C64>) -> Result<Self> {
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Unnormalized(norm));
        }
        Self::new(Operator::outer(state))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let op = Operator::identity(dim).scaled(C64::new(1.0 / dim as f64, 0.0));
        Self { op }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    /// Eigenvalues r_k, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.op
            .hermitian_eigen(f64::INFINITY)
            .expect("validated Hermitian")
            .values
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        (self.op.matrix() * self.op.matrix()).trace().re
    }

    /// Tr(ρ A); the real part, which is exact for Hermitian A.
    pub fn expectation(&self, a: &Operator) -> f64 {
        (self.op.matrix() * a.matrix()).trace().re
    }
}

/// Which tensor factor `partial_trace` keeps; the object factor is first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Object,
    Ancilla,
}

/// Tr over the discarded factor of a state on H_o ⊗ H_a.
pub fn partial_trace(
    rho: &DensityOperator,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityOperator> {
    let (d_o, d_a) = dims;
    if d_o * d_a != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} factors do not compose to dim {}",
            d_o,
            d_a,
            rho.dim()
        )));
    }
    let m = rho.op().matrix();
    let reduced = match keep {
        Subsystem::Object => Operator::from_fn(d_o, |i, j| {
            (0..d_a).map(|a| m[(i * d_a + a, j * d_a + a)]).sum()
        })?,
        Subsystem::Ancilla => Operator::from_fn(d_a, |i, j| {
            (0..d_o).map(|o| m[(o * d_a + i, o * d_a + j)]).sum()
        })?,
    };
    DensityOperator::new(reduced)
}

/// ρ(t) = e^{−iHt} ρ e^{+iHt} for Hermitian H.
pub fn evolve(rho: &DensityOperator, h: &Operator, t: f64) -> Result<DensityOperator> {
    let tol = Tolerances::default();
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian dim {} vs state dim {}",
            h.dim(),
            rho.dim()
        )));
    }
    let u = h.expi(t, tol.matrix)?;
    evolve_unitary(rho, &u)
}

/// ρ ↦ U ρ U† for an explicitly given unitary.
pub fn evolve_unitary(rho: &DensityOperator, u: &Operator) -> Result<DensityOperator> {
    let tol = Tolerances::default();
    if u.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "unitary dim {} vs state dim {}",
            u.dim(),
            rho.dim()
        )));
    }
    let defect = u.unitarity_defect();
    if defect > tol.matrix {
        return Err(Error::NotUnitary {
            defect,
            tolerance: tol.matrix,
        });
    }
    let m = u.matrix() * rho.op().matrix() * u.matrix().adjoint();
    DensityOperator::new(Operator::from_matrix(m)?)
}
