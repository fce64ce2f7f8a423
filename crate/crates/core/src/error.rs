use thiserror::Error;

use crate::grid::Topology;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("operation requires {expected:?} topology")]
    WrongTopology { expected: Topology },

    #[error("invalid kernel size {n}: N must be odd and at least 3")]
    InvalidKernelSize { n: usize },

    #[error("kernel of size {kernel} applied to a grid of {grid} points")]
    KernelMismatch { kernel: usize, grid: usize },

    #[error("kernel weights disagree with the closed-form multiplier (defect {defect:e})")]
    KernelCrossCheck { defect: f64 },

    #[error("spectral residue {residue:e} exceeds tolerance; multiplier is not conjugate-symmetric")]
    SpectralResidue { residue: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error(
        "fixed-point iteration did not converge after {iterations} iterations \
         (last contraction ratio {ratio:.3e})"
    )]
    NoConvergence { iterations: usize, ratio: f64 },

    #[error(
        "fixed-point iteration diverging at iteration {iteration}: contraction ratio \
         {ratio:.3e} exceeds guard {guard}; use a smaller lambda"
    )]
    Divergence { iteration: usize, ratio: f64, guard: f64 },

    #[error("step {step} (t = {time}): {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<BoError>,
    },

    #[error("blow-up at step {step}: h2 norm {h2:e} exceeds bound {bound:e}")]
    BlowUp { step: usize, h2: f64, bound: f64 },

    #[error("reference solution has zero norm")]
    ZeroReference,

    #[error("levels must be strictly increasing")]
    LevelsNotIncreasing,

    #[error("{0}")]
    Io(String),
}

impl BoError {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        BoError::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for BoError {
    fn from(e: std::io::Error) -> Self {
        BoError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, BoError>;
