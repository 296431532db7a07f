//! Nonideality calculus: the left-stochastic matrix λ relating an effect set
//! to a PVM, its average row entropy J (natural log throughout), von Neumann
//! preparation entropy, and the Martens / generalized-Martens /
//! Heisenberg-Robertson inequality suite.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::measure::{EffectSet, ProjectiveMeasure};
use crate::operator::{commutator, max_abs_diff, Operator};
use crate::tolerances::Tolerances;

/// A left-stochastic nonideality matrix: entries λ_kk' ≥ 0 with every column
/// summing to one. Rows index pointer outcomes, columns the PVM outcomes;
/// rows need not sum to one and the matrix need not be square.
#[derive(Debug, Clone)]
pub struct StochasticMatrix {
    mat: DMatrix<f64>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl StochasticMatrix {
    pub fn new(
        rows: Vec<Vec<f64>>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self> {
        Self::with_tolerances(rows, row_labels, col_labels, &Tolerances::default())
    }

    pub fn with_tolerances(
        rows: Vec<Vec<f64>>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n_rows = rows.len();
        if n_rows == 0 || rows[0].is_empty() {
            return Err(Error::InvalidStochastic("empty matrix".into()));
        }
        let n_cols = rows[0].len();
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::InvalidStochastic("ragged rows".into()));
        }
        if row_labels.len() != n_rows || col_labels.len() != n_cols {
            return Err(Error::InvalidStochastic("label counts do not match".into()));
        }
        let mat = DMatrix::from_fn(n_rows, n_cols, |i, j| rows[i][j]);
        for (idx, &v) in mat.iter().enumerate() {
            if !v.is_finite() || v < -tol.probability_floor {
                return Err(Error::InvalidStochastic(format!(
                    "entry {idx} = {v:.3e} below floor"
                )));
            }
        }
        for c in 0..n_cols {
            let s: f64 = mat.column(c).iter().sum();
            if (s - 1.0).abs() > tol.probability_sum {
                return Err(Error::InvalidStochastic(format!(
                    "column {c} sums to {s} (deviation {:.3e})",
                    (s - 1.0).abs()
                )));
            }
        }
        Ok(Self {
            mat,
            row_labels,
            col_labels,
        })
    }

    pub fn identity(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self {
            mat: DMatrix::identity(n, n),
            row_labels: labels.clone(),
            col_labels: labels,
        }
    }

    pub fn rows(&self) -> usize {
        self.mat.nrows()
    }

    pub fn cols(&self) -> usize {
        self.mat.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn entry(&self, k: usize, kp: usize) -> f64 {
        self.mat[(k, kp)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows())
            .map(|k| (0..self.cols()).map(|kp| self.mat[(k, kp)]).collect())
            .collect()
    }

    /// Reporting order: rows sorted by the column in which they attain
    /// their maximum. Outcome relabeling permutes rows and leaves J
    /// invariant; canonicalization is cosmetic only.
    pub fn canonical_row_order(&self) -> StochasticMatrix {
        let mut order: Vec<usize> = (0..self.rows()).collect();
        let dominant: Vec<usize> = (0..self.rows())
            .map(|k| {
                (0..self.cols())
                    .max_by(|&a, &b| self.mat[(k, a)].total_cmp(&self.mat[(k, b)]))
                    .unwrap_or(0)
            })
            .collect();
        order.sort_by_key(|&k| (dominant[k], k));
        StochasticMatrix {
            mat: DMatrix::from_fn(self.rows(), self.cols(), |i, j| self.mat[(order[i], j)]),
            row_labels: order.iter().map(|&k| self.row_labels[k].clone()).collect(),
            col_labels: self.col_labels.clone(),
        }
    }
}

/// λ_kk' = Tr(M_k E_k') together with the fit residual
/// max_k ‖M_k − Σ_k' λ_kk' E_k'‖_max, which vanishes exactly when the
/// effects are diagonal in the PVM eigenbasis. Requires a rank-one
/// (non-degenerate) PVM so the columns are normalized.
pub fn nonideality_matrix(
    effects: &EffectSet,
    pvm: &ProjectiveMeasure,
) -> Result<(StochasticMatrix, f64)> {
    if effects.dim() != pvm.dim() {
        return Err(Error::DimensionMismatch(format!(
            "effects act on dim {}, PVM on dim {}",
            effects.dim(),
            pvm.dim()
        )));
    }
    let tol = Tolerances::default();
    if !pvm.is_rank_one(1e-9) {
        return Err(Error::InvalidMeasure(
            "nonideality matrix needs rank-one projectors (non-degenerate PVM)".into(),
        ));
    }
    let rows: Vec<Vec<f64>> = effects
        .effects()
        .iter()
        .map(|m| {
            pvm.projectors()
                .iter()
                .map(|e| (m.matrix() * e.matrix()).trace().re)
                .collect()
        })
        .collect();
    let mut residual: f64 = 0.0;
    for (k, m) in effects.effects().iter().enumerate() {
        let mut fit = Operator::zeros(effects.dim());
        for (kp, e) in pvm.projectors().iter().enumerate() {
            fit = &fit + &e.scaled(C64::new(rows[k][kp], 0.0));
        }
        residual = residual.max(max_abs_diff(m, &fit));
    }
    let lam = StochasticMatrix::with_tolerances(
        rows,
        effects.labels().to_vec(),
        pvm.labels().to_vec(),
        &Tolerances {
            // trace arithmetic on validated inputs; allow their roundoff
            probability_floor: tol.probability_floor.max(1e-9),
            probability_sum: tol.probability_sum.max(1e-9),
            ..tol
        },
    )?;
    Ok((lam, residual))
}

/// Average row entropy J(λ) = −(1/N) Σ_k Σ_k' λ_kk' ln(λ_kk'/Σ_k'' λ_kk''),
/// with 0·ln(0/·) := 0 and negative-by-roundoff entries clipped to zero.
/// J ≥ 0, and J = 0 exactly on relabeled-ideal matrices.
pub fn row_entropy_j(lam: &StochasticMatrix) -> f64 {
    let n = lam.rows();
    let mut total = 0.0;
    for k in 0..n {
        let row: Vec<f64> = (0..lam.cols()).map(|kp| lam.entry(k, kp).max(0.0)).collect();
        let r: f64 = row.iter().sum();
        if r <= 0.0 {
            continue;
        }
        for &v in &row {
            if v > 0.0 {
                total += v * (v / r).ln();
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        -total / n as f64
    }
}

/// Von Neumann entropy −Σ r_k ln r_k of the eigenvalues, 0·ln 0 := 0.
/// Natural log, matching the row-entropy convention so the two add.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    rho.eigenvalues()
        .iter()
        .map(|&r| {
            let r = r.max(0.0);
            if r > 0.0 {
                -r * r.ln()
            } else {
                0.0
            }
        })
        .sum()
}

/// Total-uncertainty report: Δ = H_vN(ρ) + Σ J, the generalized Martens
/// inequality Δ ≥ Σ J holding with slack exactly H_vN.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub j_lambda: f64,
    pub j_mu: Option<f64>,
    pub h_vn: f64,
    pub delta: f64,
    /// The right-hand side Σ J of the generalized Martens inequality.
    pub bound: f64,
    pub satisfied: bool,
    pub slack: f64,
}

pub fn total_uncertainty(
    rho: &DensityOperator,
    lam: &StochasticMatrix,
    mu: Option<&StochasticMatrix>,
) -> UncertaintyReport {
    let j_lambda = row_entropy_j(lam);
    let j_mu = mu.map(row_entropy_j);
    let h_vn = von_neumann_entropy(rho);
    let bound = j_lambda + j_mu.unwrap_or(0.0);
    let delta = h_vn + bound;
    UncertaintyReport {
        j_lambda,
        j_mu,
        h_vn,
        delta,
        bound,
        satisfied: delta >= bound - 1e-12,
        slack: delta - bound,
    }
}

/// Martens bound −ln(max_ij Tr E_i F_j); zero when the PVMs share an
/// eigenvector, ln 2 for mutually unbiased qubit bases.
pub fn martens_bound(pvm_e: &ProjectiveMeasure, pvm_f: &ProjectiveMeasure) -> Result<f64> {
    if pvm_e.dim() != pvm_f.dim() {
        return Err(Error::DimensionMismatch(format!(
            "PVMs act on dims {} and {}",
            pvm_e.dim(),
            pvm_f.dim()
        )));
    }
    let mut max_overlap: f64 = 0.0;
    for e in pvm_e.projectors() {
        for f in pvm_f.projectors() {
            max_overlap = max_overlap.max((e.matrix() * f.matrix()).trace().re);
        }
    }
    Ok(-max_overlap.ln())
}

/// Outcome of a Martens-inequality evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MartensReport {
    pub j_lambda: f64,
    pub j_mu: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub slack: f64,
}

/// J(λ) + J(μ) ≥ −ln(max_ij Tr E_i F_j) for stochastic matrices arising
/// from the marginals of a joint nonideal measurement of the two PVMs.
pub fn check_martens(
    lam_e: &StochasticMatrix,
    lam_f: &StochasticMatrix,
    pvm_e: &ProjectiveMeasure,
    pvm_f: &ProjectiveMeasure,
) -> Result<MartensReport> {
    let j_lambda = row_entropy_j(lam_e);
    let j_mu = row_entropy_j(lam_f);
    let lhs = j_lambda + j_mu;
    let rhs = martens_bound(pvm_e, pvm_f)?;
    Ok(MartensReport {
        j_lambda,
        j_mu,
        lhs,
        rhs,
        satisfied: lhs >= rhs - 1e-9,
        slack: lhs - rhs,
    })
}

/// Standard deviations and the Heisenberg-Robertson bound:
/// lhs = ΔA·ΔB, rhs = ½|⟨ψ|[A,B]₋|ψ⟩|.
pub fn robertson_bound(
    a: &Operator,
    b: &Operator,
    psi: &DVector<C64>,
) -> Result<(f64, f64)> {
    let tol = Tolerances::default();
    if a.dim() != b.dim() || a.dim() != psi.len() {
        return Err(Error::DimensionMismatch(format!(
            "A dim {}, B dim {}, state dim {}",
            a.dim(),
            b.dim(),
            psi.len()
        )));
    }
    for (name, op) in [("A", a), ("B", b)] {
        let defect = op.hermiticity_defect();
        if defect > tol.matrix {
            return Err(Error::NotHermitian {
                defect,
                tolerance: tol.matrix,
            });
        }
        let _ = name;
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized(norm));
    }
    let var = |op: &Operator| -> f64 {
        let mean = op.expectation(psi).re;
        let sq = (op * op).expectation(psi).re;
        (sq - mean * mean).max(0.0)
    };
    let lhs = (var(a) * var(b)).sqrt();
    let rhs = 0.5 * commutator(a, b).expectation(psi).norm();
    Ok((lhs, rhs))
}
