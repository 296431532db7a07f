//! Measurement observables: projection-valued measures, effect sets (NODIs),
//! bivariate effect grids, and validated probability records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{max_abs_diff, Operator};
use crate::tolerances::Tolerances;

/// A PVM: mutually orthogonal Hermitian projectors summing to the identity.
#[derive(Debug, Clone)]
pub struct ProjectiveMeasure {
    projectors: Vec<Operator>,
    labels: Vec<String>,
}

impl ProjectiveMeasure {
    pub fn new(projectors: Vec<Operator>, labels: Vec<String>) -> Result<Self> {
        Self::with_tolerances(projectors, labels, &Tolerances::default())
    }

    pub fn with_tolerances(
        projectors: Vec<Operator>,
        labels: Vec<String>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if projectors.is_empty() {
            return Err(Error::InvalidMeasure("no projectors".into()));
        }
        if projectors.len() != labels.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} projectors but {} labels",
                projectors.len(),
                labels.len()
            )));
        }
        let dim = projectors[0].dim();
        for (k, e) in projectors.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "projector {k} has dim {} (expected {dim})",
                    e.dim()
                )));
            }
            if e.hermiticity_defect() > tol.matrix {
                return Err(Error::InvalidMeasure(format!("projector {k} not Hermitian")));
            }
            if max_abs_diff(&(e * e), e) > tol.matrix {
                return Err(Error::InvalidMeasure(format!("projector {k} not idempotent")));
            }
        }
        for i in 0..projectors.len() {
            for j in (i + 1)..projectors.len() {
                if (&projectors[i] * &projectors[j]).norm_max() > tol.matrix {
                    return Err(Error::InvalidMeasure(format!(
                        "projectors {i} and {j} are not orthogonal"
                    )));
                }
            }
        }
        let mut sum = Operator::zeros(dim);
        for e in &projectors {
            sum = &sum + e;
        }
        if max_abs_diff(&sum, &Operator::identity(dim)) > tol.matrix {
            return Err(Error::InvalidMeasure("projectors do not sum to identity".into()));
        }
        Ok(Self { projectors, labels })
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn projector(&self, k: usize) -> &Operator {
        &self.projectors[k]
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// True when every projector has rank one (Tr E = 1), i.e. the measured
    /// standard observable is non-degenerate.
    pub fn is_rank_one(&self, tol: f64) -> bool {
        self.projectors.iter().all(|e| (e.trace().re - 1.0).abs() <= tol)
    }
}

/// A NODI {M_k}: Hermitian positive effects summing to the identity. The
/// pointer observable of a premeasurement, or the extracted object-side POVM.
#[derive(Debug, Clone)]
pub struct EffectSet {
    effects: Vec<Operator>,
    labels: Vec<String>,
}

impl EffectSet {
    pub fn new(effects: Vec<Operator>, labels: Vec<String>) -> Result<Self> {
        Self::with_tolerances(effects, labels, &Tolerances::default())
    }

    pub fn with_tolerances(
        effects: Vec<Operator>,
        labels: Vec<String>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidMeasure("no effects".into()));
        }
        if effects.len() != labels.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} effects but {} labels",
                effects.len(),
                labels.len()
            )));
        }
        let dim = effects[0].dim();
        for (k, m) in effects.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "effect {k} has dim {} (expected {dim})",
                    m.dim()
                )));
            }
            if m.hermiticity_defect() > tol.matrix {
                return Err(Error::InvalidMeasure(format!("effect {k} not Hermitian")));
            }
            let min = m.min_eigenvalue(tol.matrix)?;
            if min < -tol.positivity {
                return Err(Error::InvalidMeasure(format!(
                    "effect {k} has negative eigenvalue {min:.3e}"
                )));
            }
        }
        let mut sum = Operator::zeros(dim);
        for m in &effects {
            sum = &sum + m;
        }
        if max_abs_diff(&sum, &Operator::identity(dim)) > tol.matrix {
            return Err(Error::InvalidMeasure("effects do not sum to identity".into()));
        }
        Ok(Self { effects, labels })
    }

    /// View a PVM as the effect set it also is.
    pub fn from_pvm(pvm: &ProjectiveMeasure) -> Self {
        Self {
            effects: pvm.projectors().to_vec(),
            labels: pvm.labels().to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn effect(&self, k: usize) -> &Operator {
        &self.effects[k]
    }

    pub fn effects(&self) -> &[Operator] {
        &self.effects
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Smallest eigenvalue over all effects.
    pub fn min_eigenvalue(&self, tol: f64) -> Result<f64> {
        let mut min = f64::INFINITY;
        for m in &self.effects {
            min = min.min(m.min_eigenvalue(tol)?);
        }
        Ok(min)
    }

    /// ‖ΣM_k − I‖_max.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = Operator::zeros(self.dim());
        for m in &self.effects {
            sum = &sum + m;
        }
        max_abs_diff(&sum, &Operator::identity(self.dim()))
    }
}

/// An N×Ñ grid of effects {M_kℓ} realizing a joint nonideal measurement;
/// rows marginalize to one nonideal observable, columns to the other.
#[derive(Debug, Clone)]
pub struct BivariateEffectSet {
    effects: Vec<Operator>,
    rows: usize,
    cols: usize,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl BivariateEffectSet {
    pub fn new(
        grid: Vec<Vec<Operator>>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let rows = grid.len();
        if rows == 0 || grid[0].is_empty() {
            return Err(Error::InvalidMeasure("empty bivariate grid".into()));
        }
        let cols = grid[0].len();
        if grid.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidMeasure("ragged bivariate grid".into()));
        }
        if row_labels.len() != rows || col_labels.len() != cols {
            return Err(Error::InvalidMeasure("label counts do not match grid".into()));
        }
        let dim = grid[0][0].dim();
        let mut effects = Vec::with_capacity(rows * cols);
        let mut sum = Operator::zeros(dim);
        for (k, row) in grid.into_iter().enumerate() {
            for (l, m) in row.into_iter().enumerate() {
                if m.dim() != dim {
                    return Err(Error::DimensionMismatch(format!(
                        "effect ({k},{l}) has dim {} (expected {dim})",
                        m.dim()
                    )));
                }
                if m.hermiticity_defect() > tol.matrix {
                    return Err(Error::InvalidMeasure(format!(
                        "effect ({k},{l}) not Hermitian"
                    )));
                }
                let min = m.min_eigenvalue(tol.matrix)?;
                if min < -tol.positivity {
                    return Err(Error::InvalidMeasure(format!(
                        "effect ({k},{l}) has negative eigenvalue {min:.3e}"
                    )));
                }
                sum = &sum + &m;
                effects.push(m);
            }
        }
        if max_abs_diff(&sum, &Operator::identity(dim)) > tol.matrix {
            return Err(Error::InvalidMeasure(
                "bivariate effects do not sum to identity".into(),
            ));
        }
        Ok(Self {
            effects,
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
        self.effects[0].dim()
    }

    pub fn effect(&self, k: usize, l: usize) -> &Operator {
        &self.effects[k * self.cols + l]
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    /// Σ_ℓ M_kℓ for each row k: the first marginal observable.
    pub fn row_marginals(&self, tol: &Tolerances) -> Result<EffectSet> {
        let mut out = Vec::with_capacity(self.rows);
        for k in 0..self.rows {
            let mut m = Operator::zeros(self.dim());
            for l in 0..self.cols {
                m = &m + self.effect(k, l);
            }
            out.push(m);
        }
        EffectSet::with_tolerances(out, self.row_labels.clone(), tol)
    }

    /// Σ_k M_kℓ for each column ℓ: the second marginal observable.
    pub fn col_marginals(&self, tol: &Tolerances) -> Result<EffectSet> {
        let mut out = Vec::with_capacity(self.cols);
        for l in 0..self.cols {
            let mut m = Operator::zeros(self.dim());
            for k in 0..self.rows {
                m = &m + self.effect(k, l);
            }
            out.push(m);
        }
        EffectSet::with_tolerances(out, self.col_labels.clone(), tol)
    }
}

/// Validated outcome probabilities: entries ≥ −1e-12 and summing to one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbabilityRecord {
    labels: Vec<String>,
    probabilities: Vec<f64>,
}

impl ProbabilityRecord {
    pub fn new(labels: Vec<String>, probabilities: Vec<f64>) -> Result<Self> {
        Self::with_tolerances(labels, probabilities, &Tolerances::default())
    }

    pub fn with_tolerances(
        labels: Vec<String>,
        probabilities: Vec<f64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if labels.len() != probabilities.len() || labels.is_empty() {
            return Err(Error::InvalidProbabilities(format!(
                "{} labels vs {} probabilities",
                labels.len(),
                probabilities.len()
            )));
        }
        for (k, &p) in probabilities.iter().enumerate() {
            if !p.is_finite() || p < -tol.probability_floor {
                return Err(Error::InvalidProbabilities(format!(
                    "entry {k} = {p:.3e} below floor"
                )));
            }
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > tol.probability_sum {
            return Err(Error::InvalidProbabilities(format!(
                "probabilities sum to {sum} (deviation {:.3e})",
                (sum - 1.0).abs()
            )));
        }
        Ok(Self {
            labels,
            probabilities,
        })
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, k: usize) -> f64 {
        self.probabilities[k]
    }
}

/// A joint N×Ñ probability table, the raw data of a joint nonideal
/// measurement. Marginals and flattening are lossless views.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JointProbabilities {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// Row-major values, shape rows × cols.
    pub values: Vec<f64>,
}

impl JointProbabilities {
    pub fn new(row_labels: Vec<String>, col_labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if row_labels.is_empty() || col_labels.is_empty() {
            return Err(Error::InvalidProbabilities("empty joint table".into()));
        }
        if values.len() != row_labels.len() * col_labels.len() {
            return Err(Error::InvalidProbabilities(format!(
                "expected {} joint values, got {}",
                row_labels.len() * col_labels.len(),
                values.len()
            )));
        }
        Ok(Self {
            row_labels,
            col_labels,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.values[k * self.cols() + l]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Σ_ℓ p_kℓ per row.
    pub fn row_marginal(&self) -> Vec<f64> {
        (0..self.rows())
            .map(|k| (0..self.cols()).map(|l| self.get(k, l)).sum())
            .collect()
    }

    /// Σ_k p_kℓ per column.
    pub fn col_marginal(&self) -> Vec<f64> {
        (0..self.cols())
            .map(|l| (0..self.rows()).map(|k| self.get(k, l)).sum())
            .collect()
    }

    /// Flatten to a single record with labels "row col" in row-major order.
    pub fn flatten(&self, tol: &Tolerances) -> Result<ProbabilityRecord> {
        let mut labels = Vec::with_capacity(self.values.len());
        for r in &self.row_labels {
            for c in &self.col_labels {
                labels.push(format!("{r} {c}"));
            }
        }
        ProbabilityRecord::with_tolerances(labels, self.values.clone(), tol)
    }
}
