use thiserror::Error;

/// Errors raised by the tomography core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("node index {index} out of range for {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("matrix is not a valid combination matrix: {0}")]
    InvalidMatrix(&'static str),

    #[error("matrix entry ({row}, {col}) is nonzero but the pair is not an edge of the graph")]
    NotSupported { row: usize, col: usize },

    #[error("matrix is close to singular (margin {margin:e})")]
    NearSingular { margin: f64 },

    #[error("matrix is singular or not positive definite")]
    Singular,

    #[error("matrix is ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("iterative solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("state diverged: |w| = {magnitude:e} at step {step}")]
    Diverged { step: usize, magnitude: f64 },

    #[error("insufficient samples: {retained} retained, at least {required} required")]
    InsufficientSamples { retained: usize, required: usize },

    #[error("zero variance in the sample of agent {agent}")]
    ZeroVariance { agent: usize },

    #[error("zero-probability degeneracy at agent {agent}")]
    ZeroProbability { agent: usize },

    #[error("degenerate clustering input: all entries are identical")]
    DegenerateClustering,

    #[error("pair ({0}, {1}) is not covered by any probe")]
    UncoveredPair(usize, usize),
}

pub type Result<T> = core::result::Result<T, Error>;
