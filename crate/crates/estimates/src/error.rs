use thiserror::Error;

#[derive(Debug, Error)]
pub enum EstimatesError {
    #[error("parameter out of range: {0}")]
    ConfigRange(String),

    #[error("window holds {have} samples, need at least {need}")]
    WindowTooSmall { have: usize, need: usize },

    #[error("degenerate input: both forcing and initial data vanish")]
    DegenerateInput,

    #[error("series `{0}` is missing from the record")]
    MissingSeries(String),

    #[error(transparent)]
    Spectral(#[from] nssl_spectral::SpectralError),
}

pub type Result<T> = std::result::Result<T, EstimatesError>;
