//! Three-component 2D Navier–Stokes background.
//!
//! The state is a velocity `v = (v₁, v₂, v₃)` on a 2D periodic grid with
//! `∂₁v₁ + ∂₂v₂ = 0`: the horizontal pair evolves as ordinary 2D
//! Navier–Stokes and the third component rides along as a passively
//! transported, diffusing scalar. Time stepping is IMEX: the diffusion factor
//! is exact per mode and the advection term is explicit Adams–Bashforth
//! (second order after the first step).

pub mod decay;
pub mod diagnostics;
pub mod solver;

pub use decay::{decay_probe, probe_data, DecayProbeParams, DecayProbeResult};
pub use diagnostics::{record_diagnostics, vorticity, DiagnosticsConfig};
pub use solver::{
    solve, solve_with_order, time_derivative, Hns2dError, Hns2dSolver, Hns2dState, Result,
};
