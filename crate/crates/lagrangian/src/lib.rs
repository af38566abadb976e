//! Flow-map machinery: trajectory integration with Jacobian transport,
//! Neumann-series inversion in the certified small-budget window, marker
//! curve tracking, and Eulerian-Lagrangian consistency reports.

pub mod consistency;
pub mod curve;
pub mod error;
pub mod flow;
pub mod invert;
pub mod velocity;

pub use consistency::{
    euler_lagrange_consistency, twisted_divergence, ConsistencyReport, EulerianSnapshot,
};
pub use curve::{patch_track, CurveRecord, MarkerCurve, PatchTrackResult};
pub use error::{LagrangianError, Result};
pub use flow::{FlowIntegrator, FlowMapState, CERTIFIED_BUDGET};
pub use invert::invert_jacobian;
pub use velocity::{rigid_rotation, AnalyticVelocity, PointVelocity, SampledVelocity, VelocitySnapshot};
