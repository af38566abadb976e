use thiserror::Error;

#[derive(Debug, Error)]
pub enum LagrangianError {
    #[error("Jacobian deviation {deviation:.3} exceeds the certified region (1/2)")]
    CertifiedRegion { deviation: f64 },

    #[error("marker curve self-intersects at t={t:.4}")]
    SelfIntersection { t: f64 },

    #[error("trajectories do not share a time grid (at index {index})")]
    TimeGridMismatch { index: usize },

    #[error(transparent)]
    Spectral(#[from] nssl_spectral::SpectralError),
}

pub type Result<T> = std::result::Result<T, LagrangianError>;
