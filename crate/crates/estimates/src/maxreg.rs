//! Maximal-regularity ratio for Stokes trajectories:
//! `(sup_t ‖u‖_{Ḃ^{2−2/p}_{p,p}} + ‖u_t‖ + ‖∇²u‖ + ‖∇Q‖_{Lp(Lp)})
//!  / (‖f‖_{Lp(Lp)} + ‖u0‖_{Ḃ^{2−2/p}_{p,p}})`.
//!
//! The interesting property is not the value but its stability: the constant
//! behind it does not depend on the horizon, so the measured ratio should
//! move by at most a bounded factor across horizons and grids.

use crate::besov::besov_norm;
use crate::error::{EstimatesError, Result};
use crate::monitor::MonitorReport;
use crate::norms::{hessian_lp_norm, lp_norm};
use crate::sumspace::time_lebesgue;
use nssl_spectral::{Forcing, StokesStep};

#[derive(Debug, Clone)]
pub struct MaxRegParts {
    pub sup_besov: f64,
    pub ut_lplp: f64,
    pub hess_lplp: f64,
    pub gradq_lplp: f64,
    pub forcing_lplp: f64,
    pub u0_besov: f64,
    pub ratio: f64,
}

pub fn maxreg_parts(traj: &[StokesStep], forcing: &Forcing<'_>, p: f64) -> Result<MaxRegParts> {
    assert!(!traj.is_empty());
    let s = 2.0 - 2.0 / p;
    let u0 = &traj[0].u;
    let u0_besov = besov_norm(u0, s, p)?;

    let mut sup_besov = 0.0f64;
    let mut ut_samples = Vec::with_capacity(traj.len());
    let mut hess_samples = Vec::with_capacity(traj.len());
    let mut gradq_samples = Vec::with_capacity(traj.len());
    let mut f_samples = Vec::with_capacity(traj.len());
    for step in traj {
        sup_besov = sup_besov.max(besov_norm(&step.u, s, p)?);
        ut_samples.push((step.t, lp_norm(&step.u_t, p)));
        hess_samples.push((step.t, hessian_lp_norm(&step.u, p)));
        gradq_samples.push((step.t, lp_norm(&step.grad_q, p)));
        let f_norm = match forcing {
            Forcing::Zero => 0.0,
            Forcing::Steady(f) => lp_norm(f, p),
            Forcing::TimeVarying(f) => lp_norm(&f(step.t), p),
        };
        f_samples.push((step.t, f_norm));
    }
    let ut_lplp = time_lebesgue(&ut_samples, p);
    let hess_lplp = time_lebesgue(&hess_samples, p);
    let gradq_lplp = time_lebesgue(&gradq_samples, p);
    let forcing_lplp = time_lebesgue(&f_samples, p);

    let denominator = forcing_lplp + u0_besov;
    if denominator == 0.0 {
        return Err(EstimatesError::DegenerateInput);
    }
    let numerator = sup_besov + ut_lplp + hess_lplp + gradq_lplp;
    Ok(MaxRegParts {
        sup_besov,
        ut_lplp,
        hess_lplp,
        gradq_lplp,
        forcing_lplp,
        u0_besov,
        ratio: numerator / denominator,
    })
}

/// Report-only monitor wrapping the measured ratio.
pub fn maxreg_ratio(traj: &[StokesStep], forcing: &Forcing<'_>, p: f64) -> Result<MonitorReport> {
    let parts = maxreg_parts(traj, forcing, p)?;
    Ok(MonitorReport::report_only(
        "maxreg-ratio",
        "stokes_maximal_regularity",
        parts.sup_besov + parts.ut_lplp + parts.hess_lplp + parts.gradq_lplp,
        parts.forcing_lplp + parts.u0_besov,
    ))
}
