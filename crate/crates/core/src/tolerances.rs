//! Numerical tolerances, centralized so that no module carries ad-hoc magic
//! numbers. Defaults sit well above f64 accumulation error for the dense
//! operator sizes this crate works with (dims ≤ 10⁴).

use serde::{Deserialize, Serialize};

/// Tolerance record threaded through every validating constructor and check.
/// Deserialization fills omitted fields from the defaults, so override files
/// may be partial.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Max-norm bound for Hermiticity, idempotence, orthogonality and
    /// completeness checks on operators.
    pub matrix: f64,
    /// Most negative admissible eigenvalue of a density operator or effect.
    pub positivity: f64,
    /// Most negative admissible probability entry (roundoff allowance).
    pub probability_floor: f64,
    /// Allowed deviation of a probability (or stochastic-matrix column) sum
    /// from one.
    pub probability_sum: f64,
    /// Required agreement between pointer statistics and the extracted
    /// object-side POVM.
    pub extraction: f64,
    /// Condition-number gate for tomography probe bases.
    pub probe_condition: f64,
    /// Condition-number gate for nonideality-matrix inversion.
    pub inversion_condition: f64,
    /// Discrete-norm conservation over a full split-operator run.
    pub grid_norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            matrix: 1e-10,
            positivity: 1e-10,
            probability_floor: 1e-12,
            probability_sum: 1e-10,
            extraction: 1e-9,
            probe_condition: 1e8,
            inversion_condition: 1e10,
            grid_norm: 1e-6,
        }
    }
}

impl Tolerances {
    /// Tolerances for effect sets reconstructed by detector tomography on an
    /// abstract premeasurement model. Positivity is relaxed to 1e-8: tiny
    /// negative eigenvalues of extracted effects are reported, not fatal.
    pub fn extracted() -> Self {
        Self {
            positivity: 1e-8,
            ..Self::default()
        }
    }

    /// Tolerances for effect sets reconstructed from grid simulations, where
    /// completeness and positivity inherit split-operator discretization
    /// error.
    pub fn grid_extracted() -> Self {
        Self {
            matrix: 1e-6,
            positivity: 1e-6,
            probability_sum: 1e-6,
            ..Self::default()
        }
    }
}
