use thiserror::Error;

#[derive(Debug, Error)]
pub enum Ins3dError {
    #[error("grids incompatible: the 3D grid's horizontal axes must match the 2D background grid")]
    GridMismatch,

    #[error("initial density deviation ‖h₀‖_∞ = {linf:.4} exceeds 1/2")]
    DensityTooLarge { linf: f64 },

    #[error("CFL violation: measured {measured:.3} exceeds limit {limit:.3} at t={t:.4}")]
    Cfl { measured: f64, limit: f64, t: f64 },

    #[error(
        "inner fixed point did not converge in {sweeps} sweeps (‖h‖_∞ = {h_linf:.4}, last update {last:.3e})"
    )]
    InnerNoConvergence {
        sweeps: usize,
        h_linf: f64,
        last: f64,
    },

    #[error("solution diverged (non-finite coefficients) at step {step}")]
    Diverged { step: usize },

    #[error("Picard stalled: contraction quantity non-decreasing over levels {levels:?}")]
    PicardStalled { levels: Vec<f64> },

    #[error(transparent)]
    Background(#[from] nssl_hns2d::Hns2dError),

    #[error(transparent)]
    Spectral(#[from] nssl_spectral::SpectralError),

    #[error(transparent)]
    Estimates(#[from] nssl_estimates::EstimatesError),
}

pub type Result<T> = std::result::Result<T, Ins3dError>;
