//! JSON wire schema for premeasurement models: dimensions, complex matrices
//! as [re, im] pair arrays (row-major), and pointer labels. serde_json emits
//! shortest-round-trip floats, so serialize → parse → serialize is
//! byte-identical.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::measure::EffectSet;
use crate::operator::Operator;
use crate::premeasurement::{Interaction, MeasurementModel};

/// Row-major complex matrix as nested [re, im] pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(op: &Operator) -> MatrixJson {
    let n = op.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = op.entry(i, j);
                    [e.re, e.im]
                })
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(m: &MatrixJson) -> Result<Operator> {
    let n = m.len();
    if n == 0 || m.iter().any(|row| row.len() != n) {
        return Err(Error::Serialization("matrix must be square".into()));
    }
    let mat = DMatrix::from_fn(n, n, |i, j| C64::new(m[i][j][0], m[i][j][1]));
    Operator::from_matrix(mat)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum InteractionJson {
    Hamiltonian { matrix: MatrixJson, time: f64 },
    Unitary { matrix: MatrixJson },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointerJson {
    pub labels: Vec<String>,
    pub effects: Vec<MatrixJson>,
}

/// The on-disk form of a [`MeasurementModel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelJson {
    pub object_dim: usize,
    pub ancilla_dim: usize,
    pub interaction: InteractionJson,
    pub ancilla_init: MatrixJson,
    pub pointer: PointerJson,
}

impl From<&MeasurementModel> for ModelJson {
    fn from(model: &MeasurementModel) -> Self {
        let interaction = match model.interaction() {
            Interaction::Hamiltonian { hamiltonian, time } => InteractionJson::Hamiltonian {
                matrix: matrix_to_json(hamiltonian),
                time: *time,
            },
            Interaction::Unitary(u) => InteractionJson::Unitary {
                matrix: matrix_to_json(u),
            },
        };
        ModelJson {
            object_dim: model.object_dim(),
            ancilla_dim: model.ancilla_dim(),
            interaction,
            ancilla_init: matrix_to_json(model.ancilla_init().op()),
            pointer: PointerJson {
                labels: model.pointer().labels().to_vec(),
                effects: model.pointer().effects().iter().map(matrix_to_json).collect(),
            },
        }
    }
}

impl TryFrom<&ModelJson> for MeasurementModel {
    type Error = Error;

    fn try_from(json: &ModelJson) -> Result<MeasurementModel> {
        let interaction = match &json.interaction {
            InteractionJson::Hamiltonian { matrix, time } => Interaction::Hamiltonian {
                hamiltonian: matrix_from_json(matrix)?,
                time: *time,
            },
            InteractionJson::Unitary { matrix } => Interaction::Unitary(matrix_from_json(matrix)?),
        };
        let ancilla_init = DensityOperator::new(matrix_from_json(&json.ancilla_init)?)?;
        let effects: Result<Vec<Operator>> =
            json.pointer.effects.iter().map(matrix_from_json).collect();
        let pointer = EffectSet::new(effects?, json.pointer.labels.clone())?;
        MeasurementModel::new(
            json.object_dim,
            json.ancilla_dim,
            interaction,
            ancilla_init,
            pointer,
        )
    }
}

pub fn model_to_json_string(model: &MeasurementModel) -> String {
    serde_json::to_string_pretty(&ModelJson::from(model)).expect("model serializes")
}

pub fn model_from_json_str(s: &str) -> Result<MeasurementModel> {
    let json: ModelJson =
        serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
    MeasurementModel::try_from(&json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_roundtrip_is_bit_exact() {
        let mut rng = crate::random::rng(61, 0);
        let u = crate::random::unitary(&mut rng, 4);
        let model = MeasurementModel::new(
            2,
            2,
            Interaction::Unitary(u),
            crate::random::density(&mut rng, 2),
            crate::random::effect_set(&mut rng, 2, 3),
        )
        .unwrap();
        let s1 = model_to_json_string(&model);
        let back = model_from_json_str(&s1).unwrap();
        let s2 = model_to_json_string(&back);
        assert_eq!(s1, s2, "serialize → parse → serialize must be identical");
    }

    #[test]
    fn hamiltonian_models_roundtrip() {
        let mut rng = crate::random::rng(62, 0);
        let h = crate::random::hermitian(&mut rng, 4);
        let model = MeasurementModel::new(
            2,
            2,
            Interaction::Hamiltonian {
                hamiltonian: h,
                time: 0.37,
            },
            crate::random::density(&mut rng, 2),
            crate::random::effect_set(&mut rng, 2, 2),
        )
        .unwrap();
        let s = model_to_json_string(&model);
        let back = model_from_json_str(&s).unwrap();
        let rho = crate::random::density(&mut rng, 2);
        let p1 = model.pointer_probabilities(&rho).unwrap();
        let p2 = back.pointer_probabilities(&rho).unwrap();
        for k in 0..p1.len() {
            assert_eq!(p1.get(k), p2.get(k), "bit-exact model reload");
        }
    }

    #[test]
    fn malformed_json_is_rejected() {
        assert!(model_from_json_str("{\"object_dim\": 2}").is_err());
        // ragged matrix
        let bad = r#"{
            "object_dim": 1, "ancilla_dim": 1,
            "interaction": {"type": "unitary", "matrix": [[[1.0, 0.0]], []]},
            "ancilla_init": [[[1.0, 0.0]]],
            "pointer": {"labels": ["+"], "effects": [[[[1.0, 0.0]]]]}
        }"#;
        assert!(model_from_json_str(bad).is_err());
    }
}
