//! Wigner operator-valued measures W_k'ℓ' = Σ_kℓ λ⁻¹_k'k μ⁻¹_ℓ'ℓ M_kℓ —
//! Hermitian but not necessarily positive — together with recovery of ideal
//! PVM statistics from nonideal joint data and quorum reconstruction of the
//! initial density operator.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::measure::{BivariateEffectSet, JointProbabilities, ProbabilityRecord, ProjectiveMeasure};
use crate::nonideality::StochasticMatrix;
use crate::operator::{max_abs_diff, traceless_hermitian_basis, Operator};
use crate::tolerances::Tolerances;

/// λ⁻¹ with the condition number that gated its computation.
#[derive(Debug, Clone)]
pub struct StochasticInverse {
    pub matrix: DMatrix<f64>,
    pub condition: f64,
}

/// Invert a square nonideality matrix with a fully pivoted (SVD) solve and
/// an explicit condition-number gate: the inverse "exists" only below
/// `tol.inversion_condition`.
pub fn invert_stochastic(lam: &StochasticMatrix, tol: &Tolerances) -> Result<StochasticInverse> {
    if !lam.is_square() {
        return Err(Error::NonSquareStochastic {
            rows: lam.rows(),
            cols: lam.cols(),
        });
    }
    let n = lam.rows();
    let svd = lam.matrix().clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > tol.inversion_condition {
        return Err(Error::SingularStochastic(condition));
    }
    let mut inverse = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut e = nalgebra::DVector::<f64>::zeros(n);
        e[j] = 1.0;
        let col = svd
            .solve(&e, 0.0)
            .map_err(|err| Error::Numerical(format!("stochastic solve: {err}")))?;
        inverse.set_column(j, &col);
    }
    let check = (lam.matrix() * &inverse - DMatrix::<f64>::identity(n, n))
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    if check > 1e-9 {
        return Err(Error::Numerical(format!(
            "inverse verification failed (residual {check:.3e})"
        )));
    }
    Ok(StochasticInverse {
        matrix: inverse,
        condition,
    })
}

/// An operator-valued measure on an N×Ñ outcome grid: elements Hermitian,
/// summing to the identity, positivity *not* required.
#[derive(Debug, Clone)]
pub struct WignerMeasure {
    elements: Vec<Operator>,
    rows: usize,
    cols: usize,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl WignerMeasure {
    fn new(
        elements: Vec<Operator>,
        rows: usize,
        cols: usize,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self> {
        let dim = elements[0].dim();
        for (i, w) in elements.iter().enumerate() {
            if w.hermiticity_defect() > 1e-10 {
                return Err(Error::InvalidMeasure(format!(
                    "Wigner element {i} not Hermitian"
                )));
            }
        }
        let mut sum = Operator::zeros(dim);
        for w in &elements {
            sum = &sum + w;
        }
        if max_abs_diff(&sum, &Operator::identity(dim)) > 1e-9 {
            return Err(Error::InvalidMeasure(
                "Wigner elements do not sum to identity".into(),
            ));
        }
        Ok(Self {
            elements,
            rows,
            cols,
            row_labels,
            col_labels,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn element(&self, kp: usize, lp: usize) -> &Operator {
        &self.elements[kp * self.cols + lp]
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    /// Σ_ℓ' W_k'ℓ' per row; equals E_k' when the bivariate input satisfies
    /// the joint-marginal relations.
    pub fn row_marginals(&self) -> Vec<Operator> {
        (0..self.rows)
            .map(|k| {
                let mut m = Operator::zeros(self.dim());
                for l in 0..self.cols {
                    m = &m + self.element(k, l);
                }
                m
            })
            .collect()
    }

    /// Σ_k' W_k'ℓ' per column.
    pub fn col_marginals(&self) -> Vec<Operator> {
        (0..self.cols)
            .map(|l| {
                let mut m = Operator::zeros(self.dim());
                for k in 0..self.rows {
                    m = &m + self.element(k, l);
                }
                m
            })
            .collect()
    }

    /// Smallest eigenvalue over all elements; strictly negative values are
    /// the Wigner-measure signature.
    pub fn min_eigenvalue(&self) -> f64 {
        self.elements
            .iter()
            .map(|w| w.min_eigenvalue(1e-8).expect("validated Hermitian"))
            .fold(f64::INFINITY, f64::min)
    }

    /// "Probabilities" Tr(ρ W_k'ℓ'), possibly negative.
    pub fn quasi_probabilities(&self, rho: &DensityOperator) -> Vec<f64> {
        self.elements.iter().map(|w| rho.expectation(w)).collect()
    }
}

/// W_k'ℓ' = Σ_kℓ λ⁻¹_k'k μ⁻¹_ℓ'ℓ M_kℓ.
pub fn wigner_measure(
    biv: &BivariateEffectSet,
    lam: &StochasticMatrix,
    mu: &StochasticMatrix,
    tol: &Tolerances,
) -> Result<WignerMeasure> {
    if lam.rows() != biv.rows() || mu.rows() != biv.cols() {
        return Err(Error::DimensionMismatch(format!(
            "bivariate grid {}x{} vs λ rows {} and μ rows {}",
            biv.rows(),
            biv.cols(),
            lam.rows(),
            mu.rows()
        )));
    }
    let lam_inv = invert_stochastic(lam, tol)?;
    let mu_inv = invert_stochastic(mu, tol)?;
    let dim = biv.dim();
    let rows = lam.cols();
    let cols = mu.cols();
    let mut elements = Vec::with_capacity(rows * cols);
    for kp in 0..rows {
        for lp in 0..cols {
            let mut w = Operator::zeros(dim);
            for k in 0..biv.rows() {
                for l in 0..biv.cols() {
                    let coeff = lam_inv.matrix[(kp, k)] * mu_inv.matrix[(lp, l)];
                    w = &w + &biv.effect(k, l).scaled(C64::new(coeff, 0.0));
                }
            }
            elements.push(w);
        }
    }
    WignerMeasure::new(
        elements,
        rows,
        cols,
        lam.col_labels().to_vec(),
        mu.col_labels().to_vec(),
    )
}

/// Ideal probabilities recovered from nonideal joint data. Entries may come
/// out slightly negative under sampling noise; they are reported raw and
/// flagged, never clipped.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructedProbs {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
    pub has_negative: bool,
}

impl ReconstructedProbs {
    fn new(labels: Vec<String>, values: Vec<f64>) -> Self {
        let has_negative = values.iter().any(|&v| v < 0.0);
        Self {
            labels,
            values,
            has_negative,
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// p_E(k') = Σ_k λ⁻¹_k'k (Σ_ℓ p_kℓ) and the analogous column recovery.
pub fn reconstruct_ideal_probs(
    joint: &JointProbabilities,
    lam: &StochasticMatrix,
    mu: &StochasticMatrix,
    tol: &Tolerances,
) -> Result<(ReconstructedProbs, ReconstructedProbs)> {
    if joint.rows() != lam.rows() || joint.cols() != mu.rows() {
        return Err(Error::DimensionMismatch(format!(
            "joint table {}x{} vs λ rows {} and μ rows {}",
            joint.rows(),
            joint.cols(),
            lam.rows(),
            mu.rows()
        )));
    }
    let total = joint.sum();
    if (total - 1.0).abs() > tol.probability_sum.max(1e-9) {
        return Err(Error::InvalidProbabilities(format!(
            "joint probabilities sum to {total}"
        )));
    }
    let lam_inv = invert_stochastic(lam, tol)?;
    let mu_inv = invert_stochastic(mu, tol)?;
    let row_marg = joint.row_marginal();
    let col_marg = joint.col_marginal();
    let p_e: Vec<f64> = (0..lam.cols())
        .map(|kp| (0..lam.rows()).map(|k| lam_inv.matrix[(kp, k)] * row_marg[k]).sum())
        .collect();
    let p_f: Vec<f64> = (0..mu.cols())
        .map(|lp| (0..mu.rows()).map(|l| mu_inv.matrix[(lp, l)] * col_marg[l]).sum())
        .collect();
    Ok((
        ReconstructedProbs::new(lam.col_labels().to_vec(), p_e),
        ReconstructedProbs::new(mu.col_labels().to_vec(), p_f),
    ))
}

/// Result of a least-squares quorum reconstruction.
#[derive(Debug, Clone)]
pub struct QuorumReconstruction {
    /// Projected (eigenvalue-clipped, renormalized) density operator.
    pub rho: DensityOperator,
    /// Raw least-squares solution before projection.
    pub least_squares: Operator,
    /// ‖A x − b‖₂ of the least-squares system.
    pub residual: f64,
    /// Max-norm distance moved by the projection step.
    pub projection_distance: f64,
    /// Condition number of the quorum design matrix.
    pub condition: f64,
}

/// Least-squares solve of Tr(ρ E_i) = p_i over all quorum PVMs, with ρ
/// parametrized as I/d + (traceless Hermitian part) so the trace is pinned.
/// Rank-deficient quorums (PVMs that do not span the Hermitian operator
/// space) are rejected.
pub fn quorum_reconstruct(
    measurements: &[(ProjectiveMeasure, ProbabilityRecord)],
    tol: &Tolerances,
) -> Result<QuorumReconstruction> {
    if measurements.is_empty() {
        return Err(Error::InvalidParams("empty quorum".into()));
    }
    let dim = measurements[0].0.dim();
    let n_par = dim * dim - 1;
    let basis = traceless_hermitian_basis(dim);

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (pvm, record) in measurements {
        if pvm.dim() != dim {
            return Err(Error::DimensionMismatch(
                "quorum PVMs act on different spaces".into(),
            ));
        }
        if pvm.len() != record.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} projectors vs {} probabilities",
                pvm.len(),
                record.len()
            )));
        }
        for (i, e) in pvm.projectors().iter().enumerate() {
            let row: Vec<f64> = basis
                .iter()
                .map(|b| (e.matrix() * b.matrix()).trace().re)
                .collect();
            rows.push(row);
            rhs.push(record.get(i) - e.trace().re / dim as f64);
        }
    }
    let a = DMatrix::from_fn(rows.len(), n_par, |i, j| rows[i][j]);
    let b = nalgebra::DVector::from_vec(rhs);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > smax * 1e-10)
        .count();
    if rank < n_par {
        return Err(Error::RankDeficientQuorum {
            rank,
            needed: n_par,
        });
    }
    let smin = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let condition = smax / smin;
    let x = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::Numerical(format!("quorum solve: {e}")))?;
    let residual = (&a * &x - &b).norm();

    let mut ls = Operator::identity(dim).scaled(C64::new(1.0 / dim as f64, 0.0));
    for (j, bj) in basis.iter().enumerate() {
        ls = &ls + &bj.scaled(C64::new(x[j], 0.0));
    }

    // project: clip negative eigenvalues, renormalize the trace
    let eig = ls.hermitian_eigen(tol.matrix)?;
    let clipped: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::Numerical("projection collapsed to zero trace".into()));
    }
    let renormalized: Vec<f64> = clipped.iter().map(|v| v / total).collect();
    let projected = eig.with_values(&renormalized);
    let projection_distance = max_abs_diff(&projected, &ls);
    let rho = DensityOperator::with_tolerances(projected, tol)?;
    Ok(QuorumReconstruction {
        rho,
        least_squares: ls,
        residual,
        projection_distance,
        condition,
    })
}
