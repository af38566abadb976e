//! Norm engine and inequality monitors.

pub mod besov;
pub mod error;
pub mod fit;
pub mod interp_ineq;
pub mod maxreg;
pub mod monitor;
pub mod norms;
pub mod series;
pub mod sumspace;
pub mod weighted;

pub use besov::besov_norm;
pub use error::{EstimatesError, Result};
pub use fit::{decay_fit, DecayFit};
pub use interp_ineq::{gradient_interpolation_selftest, ladyzhenskaya_selftest};
pub use maxreg::{maxreg_parts, maxreg_ratio, MaxRegParts};
pub use monitor::{render_reports, MonitorReport, Verdict};
pub use norms::{
    grad_lp_norm, gradient_components, hessian_components, hessian_lp_norm, l2_linf_norm, lp_norm,
    lp_norm_physical, sobolev_norm,
};
pub use series::{trapezoid, NormRecord, NormSeries};
pub use sumspace::{sumspace_norm, time_lebesgue, SumSpaceValue};
pub use weighted::{weighted_monitors, weighted_series};
