use thiserror::Error;

/// Errors produced by validating constructors and numerically gated operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("operator is not Hermitian (defect {defect:.3e} > {tolerance:.3e})")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("operator is not unitary (defect {defect:.3e} > {tolerance:.3e})")]
    NotUnitary { defect: f64, tolerance: f64 },

    #[error("state vector is not normalized (norm {0})")]
    Unnormalized(f64),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid probability record: {0}")]
    InvalidProbabilities(String),

    #[error("invalid stochastic matrix: {0}")]
    InvalidStochastic(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("probe basis is ill-conditioned (condition number {0:.3e})")]
    IllConditionedProbes(f64),

    #[error("stochastic matrix is numerically singular (condition number {0:.3e})")]
    SingularStochastic(f64),

    #[error("cannot invert a non-square stochastic matrix ({rows}x{cols})")]
    NonSquareStochastic { rows: usize, cols: usize },

    #[error("quorum is rank deficient (rank {rank}, need {needed})")]
    RankDeficientQuorum { rank: usize, needed: usize },

    #[error(
        "potential phase per step {phase:.3} rad exceeds the pi/4 guard; increase `steps`"
    )]
    StepSizeGuard { phase: f64 },

    #[error("serialization: {0}")]
    Serialization(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors raised by a numerical guard rather than by input
    /// validation (`SingularStochastic`, `StepSizeGuard`, ...). The CLI maps
    /// these to a distinct exit code.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::IllConditionedProbes(_)
                | Error::SingularStochastic(_)
                | Error::RankDeficientQuorum { .. }
                | Error::StepSizeGuard { .. }
                | Error::Numerical(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
