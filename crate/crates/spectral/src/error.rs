use thiserror::Error;

/// Errors raised by the spectral kernels.
#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: grid holds {expected} samples per component, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("right-hand side mean {mean:.3e} exceeds the consistency limit {limit:.3e}")]
    NonzeroMean { mean: f64, limit: f64 },

    #[error("non-finite coefficient detected at step {step}")]
    NonFinite { step: usize },

    #[error("snapshot i/o: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SpectralError>;
