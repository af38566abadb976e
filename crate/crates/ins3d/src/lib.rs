//! The 3D perturbation system around the 2D background: density deviation
//! transported through the full velocity, momentum deviation advanced IMEX
//! with the density coupling implicit in the time derivative, plus the
//! Picard approximation mode and the stability monitors.

pub mod background;
pub mod error;
pub mod forcing;
pub mod monolithic;
pub mod picard;
pub mod stability;
pub mod stepper;
pub mod transport;

pub use background::{
    broadcast_physical, extend_spectral, record_background, Background, BackgroundStep,
};
pub use error::{Ins3dError, Result};
pub use forcing::{ForcingAssembler, ForcingBreakdown};
pub use monolithic::MonolithicSolver;
pub use picard::{contraction_quantity, picard_solve, PicardParams, PicardRun, PicardTrajectory};
pub use stability::{stability_experiment, StabilityConfig, StabilityOutcome};
pub use stepper::{Ins3dSolver, StepParams};
pub use transport::{density_advect_sl, spectral_advection_rhs, DensityScheme};
