//! Simulation toolkit for generalized quantum measurement.
//!
//! A measurement is modeled as a unitary interaction between a
//! (sub)microscopic object and an equally (sub)microscopic probe/ancilla:
//! the joint state ρ_o ⊗ ρ_a evolves under U = exp(−iHT), pointer statistics
//! are read on the ancilla, and detector tomography recovers the effective
//! object-side POVM whose expectations reproduce those statistics on every
//! input. On top of that sit the nonideality calculus (stochastic matrices,
//! entropic measures, the Martens and Robertson inequality suites), Wigner
//! operator-valued measures with their marginal identities, quorum state
//! reconstruction, seeded Monte-Carlo sampling, and a grid-level
//! Stern-Gerlach workload tying everything together.
//!
//! Conventions: ħ = 1, natural units throughout, natural logarithms in all
//! entropies.
//!
//! # Example
//! ```
//! use measim_core::{qubit, DensityOperator, MeasurementModel};
//!
//! // object basis controls an ancilla bit flip; pointer = computational PVM
//! let model = MeasurementModel::controlled_flip();
//!
//! // pointer statistics for a ∣x+⟩ preparation
//! let rho = DensityOperator::pure(&qubit::ket_x_plus()).unwrap();
//! let probs = model.pointer_probabilities(&rho).unwrap();
//! assert!((probs.get(0) - 0.5).abs() < 1e-12);
//!
//! // detector tomography reproduces those statistics on the object side
//! let effects = model.extract_effective_povm().unwrap();
//! let deviation = model
//!     .check_probability_identity_against(&rho, &effects)
//!     .unwrap();
//! assert!(deviation < 1e-10);
//! ```

pub mod density;
pub mod error;
pub mod jsonrep;
pub mod measure;
pub mod nonideality;
pub mod operator;
pub mod premeasurement;
pub mod qubit;
pub mod random;
pub mod sampling;
pub mod schmidt;
pub mod sterngerlach;
pub mod tolerances;
pub mod tomography;
pub mod wigner;

pub use density::{evolve, evolve_unitary, partial_trace, DensityOperator, Subsystem};
pub use error::{Error, Result};
pub use measure::{
    BivariateEffectSet, EffectSet, JointProbabilities, ProbabilityRecord, ProjectiveMeasure,
};
pub use nonideality::{
    check_martens, martens_bound, nonideality_matrix, robertson_bound, row_entropy_j,
    total_uncertainty, von_neumann_entropy, MartensReport, StochasticMatrix, UncertaintyReport,
};
pub use operator::{commutator, max_abs_diff, Operator};
pub use premeasurement::{Interaction, MeasurementModel};
pub use sampling::{convergence_report, sample_outcomes, ConvergenceReport, SampleCounts};
pub use schmidt::{schmidt_decompose, SchmidtDecomposition};
pub use sterngerlach::{SgParams, SgVariant};
pub use tolerances::Tolerances;
pub use wigner::{
    invert_stochastic, quorum_reconstruct, reconstruct_ideal_probs, wigner_measure,
    QuorumReconstruction, ReconstructedProbs, WignerMeasure,
};
