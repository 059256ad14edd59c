use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QfimError {
    #[error("series depth {requested} exceeds the configured cap of {cap} terms")]
    SeriesDepth { requested: usize, cap: usize },

    #[error("zero-length vector where a direction is required")]
    DegenerateVector,

    #[error("unphysical Bloch vector with |r| = {norm}")]
    UnphysicalState { norm: f64 },

    #[error("coefficient derivative is zero; the parameter does not enter the dynamics")]
    ZeroDerivative,

    #[error("finite-difference step {0:e} outside [1e-12, 1e-2]")]
    StepSize(f64),

    #[error("{0} parameters requested; SU(2) dynamics carries at most 3")]
    Dimensionality(usize),

    #[error("probe state is not normalized (norm^2 = {0})")]
    Normalization(f64),

    #[error("probe Bloch vector must be pure (|r| = 1), got |r| = {0}")]
    MixedProbe(f64),

    #[error("parameter index {index} out of range for a {dim}-parameter map")]
    ParameterIndex { index: usize, dim: usize },

    #[error("invalid field point: {0}")]
    InvalidField(String),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
}

pub type Result<T> = std::result::Result<T, QfimError>;
