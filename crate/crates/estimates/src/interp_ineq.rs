//! Interpolation-inequality self-tests: measured constants on random field
//! ensembles, reported but never gating. The two shapes are the 2D
//! Ladyzhenskaya bound `‖f‖_{L4} ≤ C ‖f‖_{L2}^{1/2} ‖∇f‖_{L2}^{1/2}` (for
//! mean-free fields) and the gradient bound
//! `‖∇w‖_{Lp} ≤ C (‖w‖_{Ḃ^{2−2/p}_{p,p}} + ‖w‖_{L2})`.

use crate::besov::besov_norm;
use crate::error::Result;
use crate::monitor::MonitorReport;
use crate::norms::{grad_lp_norm, lp_norm, lp_norm_physical};
use nssl_spectral::SpectralField;

/// Measured constant of the 2D L4 interpolation bound over an ensemble.
pub fn ladyzhenskaya_selftest(fields: &[SpectralField]) -> MonitorReport {
    let mut worst = 0.0f64;
    for f in fields {
        let mut mean_free = f.clone();
        for c in 0..mean_free.ncomp() {
            mean_free.set_mean(c, 0.0);
        }
        let l4 = lp_norm_physical(&mean_free.to_physical(), 4.0);
        let l2 = mean_free.l2_norm();
        let grad = mean_free.h1_seminorm();
        if l2 > 0.0 && grad > 0.0 {
            worst = worst.max(l4 / (l2.sqrt() * grad.sqrt()));
        }
    }
    MonitorReport::report_only("interp-l4", "interpolation_l4_bound", worst, 1.0)
}

/// Measured constant of `‖∇w‖_{Lp} ≤ C(‖w‖_{Ḃ^{2−2/p}_{p,p}} + ‖w‖_{L2})`.
pub fn gradient_interpolation_selftest(fields: &[SpectralField], p: f64) -> Result<MonitorReport> {
    let s = 2.0 - 2.0 / p;
    let mut worst = 0.0f64;
    for f in fields {
        let lhs = grad_lp_norm(f, p);
        let rhs = besov_norm(f, s, p)? + lp_norm(f, 2.0);
        if rhs > 0.0 {
            worst = worst.max(lhs / rhs);
        }
    }
    Ok(MonitorReport::report_only(
        "interp-gradient",
        "interpolation_gradient_bound",
        worst,
        1.0,
    ))
}
