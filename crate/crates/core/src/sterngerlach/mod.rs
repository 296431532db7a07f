//! End-to-end Stern-Gerlach workload: a spin-1/2 ⊗ 2D (y,z) wavepacket
//! evolved by split-operator integration under one of three magnetic-field
//! models, with momentum-sign binning standing in for the screen.
//!
//! Hamiltonians (natural units, ħ = m-parametrized, μ/2 prefactor shared by
//! all variants so P_z(t) = ½·b·σ_z·t is reproduced at μ = 1):
//!
//! * ideal:      H = (P_y² + P_z²)/2m + (μ/2)(a − bZ)σ_z
//! * corrected:  H = (P_y² + P_z²)/2m + (μ/2){bYσ_y + (a − bZ)σ_z}
//! * quadrupole: the corrected field at a = 0, read out jointly in
//!   (sign P_y, sign P_z)
//!
//! The x motion is decoupled free flight that only carries the atom to the
//! screen, so it is replaced by momentum binning at t = τ. Orientation is
//! fixed by b > 0: the upper bin (p_z > 0) corresponds to σ_z = +.

mod engine;
mod readout;

pub use engine::{build_initial_state, evolve_sg, evolve_sg_recording, GridState, TimeSample};
pub use readout::{
    calibrate, calibrate_with, conserved_quantity_residual, extract_bivariate_effects,
    extract_bivariate_effects_with, extract_effects, extract_effects_with,
    field_divergence_check, readout_joint_bins, readout_momentum_bins, ConservedObservable,
};

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which magnetic-field model drives the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SgVariant {
    Ideal,
    Corrected,
    /// Corrected field with a forced to 0; `SgParams::a` is ignored.
    Quadrupole,
}

impl SgVariant {
    pub fn has_y_coupling(self) -> bool {
        !matches!(self, SgVariant::Ideal)
    }

    /// Effective field offset entering the Hamiltonian.
    pub fn effective_a(self, a: f64) -> f64 {
        match self {
            SgVariant::Quadrupole => 0.0,
            _ => a,
        }
    }
}

impl std::str::FromStr for SgVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(SgVariant::Ideal),
            "corrected" => Ok(SgVariant::Corrected),
            "quadrupole" => Ok(SgVariant::Quadrupole),
            other => Err(Error::InvalidParams(format!("unknown variant '{other}'"))),
        }
    }
}

impl std::fmt::Display for SgVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SgVariant::Ideal => "ideal",
            SgVariant::Corrected => "corrected",
            SgVariant::Quadrupole => "quadrupole",
        };
        write!(f, "{s}")
    }
}

/// Run parameters. The defaults put the momentum kick ½bτ = 2.5 at 2.5σ of
/// the packet's momentum spread — the strong-coupling regime where the
/// ideal variant shows strict sign correlation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgParams {
    /// Field offset (z component at the origin).
    pub a: f64,
    /// Field gradient.
    pub b: f64,
    /// Magnetic-moment coefficient μ.
    pub mu: f64,
    /// Atom mass m.
    pub mass: f64,
    /// Interaction time τ.
    pub tau: f64,
    /// Grid points per axis (power of two, ≥ 16).
    pub grid_n: usize,
    /// Half-width of the spatial box per axis.
    pub extent: f64,
    /// Initial Gaussian width w (position-space standard deviation).
    pub packet_width: f64,
    /// Time steps; None sizes steps so the potential phase per step ≤ π/8.
    pub steps: Option<usize>,
    pub variant: SgVariant,
}

impl Default for SgParams {
    fn default() -> Self {
        Self {
            a: 0.0,
            b: 5.0,
            mu: 1.0,
            mass: 1.0,
            tau: 1.0,
            grid_n: 128,
            extent: 20.0,
            packet_width: 1.0,
            steps: None,
            variant: SgVariant::Ideal,
        }
    }
}

/// Maximum admissible potential phase per step.
const PHASE_GUARD: f64 = std::f64::consts::FRAC_PI_4;
/// Target potential phase per step for automatic step sizing.
const PHASE_TARGET: f64 = std::f64::consts::FRAC_PI_8;

impl SgParams {
    pub fn defaults_for(variant: SgVariant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a", self.a),
            ("b", self.b),
            ("mu", self.mu),
            ("mass", self.mass),
            ("tau", self.tau),
            ("extent", self.extent),
            ("packet_width", self.packet_width),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite")));
            }
        }
        if self.grid_n < 16 || !self.grid_n.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "grid_n must be a power of two ≥ 16, got {}",
                self.grid_n
            )));
        }
        if self.extent <= 0.0 {
            return Err(Error::InvalidParams("extent must be positive".into()));
        }
        if self.tau <= 0.0 {
            return Err(Error::InvalidParams("tau must be positive".into()));
        }
        if self.mass <= 0.0 {
            return Err(Error::InvalidParams("mass must be positive".into()));
        }
        if self.packet_width <= 0.0 || self.packet_width > self.extent / 8.0 {
            return Err(Error::InvalidParams(format!(
                "packet width {} must be positive and ≤ extent/8 = {}",
                self.packet_width,
                self.extent / 8.0
            )));
        }
        if self.steps == Some(0) {
            return Err(Error::InvalidParams("steps must be ≥ 1".into()));
        }
        Ok(())
    }

    /// Upper bound on the spin-potential magnitude over the box.
    pub fn max_potential(&self) -> f64 {
        let a_eff = self.variant.effective_a(self.a);
        let beta_max = (self.mu / 2.0).abs()
            * (a_eff.abs() + self.b.abs() * self.extent);
        if self.variant.has_y_coupling() {
            let alpha_max = (self.mu / 2.0).abs() * self.b.abs() * self.extent;
            alpha_max.hypot(beta_max)
        } else {
            beta_max
        }
    }

    /// Concrete step count: the explicit `steps` if given (guarded at π/4
    /// phase per step), otherwise sized so the phase per step is ≤ π/8.
    pub fn resolved_steps(&self) -> Result<usize> {
        self.validate()?;
        let vmax = self.max_potential();
        match self.steps {
            Some(steps) => {
                let phase = vmax * self.tau / steps as f64;
                if phase > PHASE_GUARD {
                    return Err(Error::StepSizeGuard { phase });
                }
                Ok(steps)
            }
            None => {
                let steps = (self.tau * vmax / PHASE_TARGET).ceil() as usize;
                Ok(steps.max(1))
            }
        }
    }
}

/// A generic reference spin state with no special alignment to any Pauli
/// axis; used by the conserved-quantity diagnostics.
pub fn generic_spin() -> DVector<C64> {
    let theta: f64 = 0.7;
    let phi: f64 = 0.9;
    DVector::from_vec(vec![
        C64::new(theta.cos(), 0.0),
        C64::new(phi.cos() * theta.sin(), phi.sin() * theta.sin()),
    ])
}
