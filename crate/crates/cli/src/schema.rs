//! On-disk input schemas shared by the subcommands: PVMs, stochastic
//! matrices and density operators as JSON, plus spin-state names.

use anyhow::{anyhow, Result};
use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use measim_core::jsonrep::{matrix_from_json, MatrixJson};
use measim_core::qubit;
use measim_core::{DensityOperator, ProjectiveMeasure, StochasticMatrix};

#[derive(Debug, Serialize, Deserialize)]
pub struct PvmFile {
    pub labels: Vec<String>,
    pub projectors: Vec<MatrixJson>,
}

impl PvmFile {
    pub fn load(path: &std::path::Path) -> Result<ProjectiveMeasure> {
        let text = crate::output::read_to_string(path)?;
        let file: PvmFile = serde_json::from_str(&text)?;
        let projectors = file
            .projectors
            .iter()
            .map(|m| matrix_from_json(m).map_err(anyhow::Error::from))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProjectiveMeasure::new(projectors, file.labels)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StochasticFile {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl StochasticFile {
    pub fn load(path: &std::path::Path) -> Result<StochasticMatrix> {
        let text = crate::output::read_to_string(path)?;
        let file: StochasticFile = serde_json::from_str(&text)?;
        Ok(StochasticMatrix::new(
            file.rows,
            file.row_labels,
            file.col_labels,
        )?)
    }

    pub fn from_matrix(lam: &StochasticMatrix) -> Self {
        Self {
            row_labels: lam.row_labels().to_vec(),
            col_labels: lam.col_labels().to_vec(),
            rows: lam.to_rows(),
        }
    }
}

pub fn load_density(path: &std::path::Path) -> Result<DensityOperator> {
    let text = crate::output::read_to_string(path)?;
    let json: MatrixJson = serde_json::from_str(&text)?;
    Ok(DensityOperator::new(matrix_from_json(&json)?)?)
}

/// Named spin states accepted by `--spin` and `--state`.
pub fn parse_spin(name: &str) -> Result<DVector<C64>> {
    Ok(match name {
        "z+" => qubit::ket_z_plus(),
        "z-" => qubit::ket_z_minus(),
        "x+" => qubit::ket_x_plus(),
        "x-" => qubit::ket_x_minus(),
        "y+" => qubit::ket_y_plus(),
        "y-" => qubit::ket_y_minus(),
        "generic" => measim_core::sterngerlach::generic_spin(),
        other => {
            return Err(anyhow!(
                "unknown spin '{other}' (expected z+, z-, x+, x-, y+, y-, generic)"
            ))
        }
    })
}

/// Comma-separated probabilities, e.g. "0.5,0.5".
pub fn parse_probs(spec: &str, labels: Option<&str>) -> Result<measim_core::ProbabilityRecord> {
    let values: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| anyhow!("bad probability '{s}': {e}")))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = match labels {
        Some(names) => names.split(',').map(|s| s.trim().to_string()).collect(),
        None => (0..values.len()).map(|k| format!("o{k}")).collect(),
    };
    Ok(measim_core::ProbabilityRecord::new(labels, values)?)
}
