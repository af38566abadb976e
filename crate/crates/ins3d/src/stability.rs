//! Stability experiment: run the perturbation system to a horizon and report
//! the density bounds, the deviation energy ledger, the density-gradient
//! envelope, and the smallness-condition numbers. Constants in the smallness
//! condition are generic, so those entries are report-only: the user
//! supplies candidate values and the report prints the measured ratio.

use crate::error::Result;
use crate::stepper::{Ins3dSolver, StepParams};
use crate::background::Background;
use nssl_estimates::{besov_norm, lp_norm_physical, trapezoid, MonitorReport, NormSeries};
use nssl_spectral::SpectralField;

#[derive(Debug, Clone)]
pub struct StabilityConfig {
    pub t_end: f64,
    pub cadence: f64,
    /// Lebesgue index of the data class (must exceed 3).
    pub p: f64,
    /// Candidate constants of the smallness condition (report-only).
    pub c0: Option<f64>,
    pub c_prime: Option<f64>,
    pub density_slack: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            t_end: 1.0,
            cadence: 0.1,
            p: 4.0,
            c0: None,
            c_prime: None,
            density_slack: 1e-2,
        }
    }
}

pub struct StabilityOutcome {
    pub series: NormSeries,
    pub reports: Vec<MonitorReport>,
    /// `sup_t ‖w‖_{L2} + (∫‖∇w‖²)^{1/2}` over `‖(w₀,h₀)‖_{L2}`.
    pub amplification: f64,
}

pub fn stability_experiment(
    h0: &SpectralField,
    w0: &SpectralField,
    v2d0: &SpectralField,
    params: StepParams,
    config: &StabilityConfig,
) -> Result<StabilityOutcome> {
    let background = Background::live(v2d0)?;
    let mut solver = Ins3dSolver::new(h0, w0, background, params)?;
    let mut series = NormSeries::new();

    let h0_phys = solver.h.to_physical();
    let h0_l2 = solver.h.l2_norm();
    let h0_linf = h0_phys.max_abs();
    let h0_l2linf = h0_l2.max(h0_linf);
    let w0_l2 = solver.w.l2_norm();
    let grad_h0_l3 = lp_norm_physical(
        &nssl_estimates::gradient_components(&solver.h).to_physical(),
        3.0,
    );
    let data_l2 = (w0_l2 * w0_l2 + h0_l2 * h0_l2).sqrt();

    let mut grad_w_sq_samples: Vec<(f64, f64)> = Vec::new();
    let mut grad_v_linf_samples: Vec<(f64, f64)> = Vec::new();
    let record = |solver: &Ins3dSolver,
                      series: &mut NormSeries,
                      grad_w_sq: &mut Vec<(f64, f64)>,
                      grad_v_linf: &mut Vec<(f64, f64)>| {
        let t = solver.t;
        let h_phys = solver.h.to_physical();
        series.push(t, "h_l2", solver.h.l2_norm());
        series.push(t, "h_linf", h_phys.max_abs());
        series.push(t, "w_l2", solver.w.l2_norm());
        series.push(t, "div_w_linf", solver.divergence_linf());
        let grad_h = nssl_estimates::gradient_components(&solver.h).to_physical();
        series.push(t, "grad_h_l3", lp_norm_physical(&grad_h, 3.0));
        let gw = solver.w.h1_seminorm();
        series.push(t, "grad_w_l2", gw);
        grad_w_sq.push((t, gw * gw));
        // ∇v in L∞ for the envelope: v = v²ᵈ + w.
        let grad_w_phys = nssl_estimates::gradient_components(&solver.w).to_physical();
        let (v2d, _) = solver.background.current();
        let grad_v2d = nssl_estimates::gradient_components(v2d).to_physical();
        let gv = grad_w_phys.max_magnitude() + grad_v2d.max_magnitude();
        grad_v_linf.push((t, gv));
        series.push(t, "grad_v_linf", gv);
        let contraction = solver
            .last_contractions
            .iter()
            .fold(0.0f64, |a, &b| a.max(b));
        series.push(t, "inner_contraction", contraction);
    };

    record(
        &solver,
        &mut series,
        &mut grad_w_sq_samples,
        &mut grad_v_linf_samples,
    );
    let steps_per_sample = (config.cadence / solver.params.dt).round().max(1.0) as usize;
    let nsamples = (config.t_end / (steps_per_sample as f64 * solver.params.dt)).round() as usize;
    for _ in 0..nsamples {
        for _ in 0..steps_per_sample {
            solver.step()?;
        }
        record(
            &solver,
            &mut series,
            &mut grad_w_sq_samples,
            &mut grad_v_linf_samples,
        );
    }

    // (a) density bound: sup_t ‖h‖_{L2∩L∞} / ‖h₀‖_{L2∩L∞} ≤ 1 + slack.
    let sup_h = series
        .get("h_l2")
        .iter()
        .map(|&(_, v)| v)
        .zip(series.get("h_linf").iter().map(|&(_, v)| v))
        .map(|(a, b)| a.max(b))
        .fold(0.0f64, f64::max);
    let density_report = MonitorReport::checked(
        "density-bound",
        "density_l2linf_conserved",
        sup_h,
        h0_l2linf,
        config.density_slack,
    );

    // (b) energy ledger and amplification factor.
    let sup_w = series.get("w_l2").iter().map(|&(_, v)| v).fold(0.0, f64::max);
    let diss = trapezoid(&grad_w_sq_samples).max(0.0).sqrt();
    let amplification = if data_l2 > 0.0 {
        (sup_w + diss) / data_l2
    } else {
        0.0
    };
    let energy_report = MonitorReport::report_only(
        "deviation-energy-amplification",
        "deviation_energy_ledger",
        sup_w + diss,
        data_l2,
    );

    // (c) density-gradient envelope: sup‖∇h‖_{L3} ≤ ‖∇h₀‖_{L3}·exp(∫‖∇v‖_∞).
    let sup_grad_h = series
        .get("grad_h_l3")
        .iter()
        .map(|&(_, v)| v)
        .fold(0.0, f64::max);
    let lip_integral = trapezoid(&grad_v_linf_samples);
    let envelope = grad_h0_l3 * lip_integral.exp();
    let grad_report = MonitorReport::checked(
        "density-gradient-envelope",
        "density_gradient_growth",
        sup_grad_h,
        envelope,
        0.05,
    );

    // (d) smallness report: measured data size against the user-supplied
    // envelope built from the background norms.
    let w0_besov = besov_norm(&solver_initial_w(w0), 2.0 - 2.0 / config.p, config.p)?;
    let data_size = h0_l2linf + w0_l2.max(w0_besov);
    let v2d0_l2 = v2d0.l2_norm();
    let v2d0_besov = besov_norm(v2d0, 3.0 - 2.0 / config.p, config.p)?;
    series.push(config.t_end + 1.0, "background_l2", v2d0_l2);
    series.push(config.t_end + 1.0, "background_besov", v2d0_besov);
    let smallness = match (config.c0, config.c_prime) {
        (Some(c0), Some(cp)) => {
            let envelope = c0
                * (-cp
                    * ((v2d0_l2.max(v2d0_besov)).powf(4.0 * config.p) + 1.0)
                    * (cp * (1.0 + v2d0_l2.powi(4))).exp())
                .exp();
            MonitorReport::report_only("smallness-condition", "data_smallness", data_size, envelope)
        }
        _ => MonitorReport::report_only("smallness-condition", "data_smallness", data_size, 0.0),
    };

    Ok(StabilityOutcome {
        series,
        reports: vec![density_report, energy_report, grad_report, smallness],
        amplification,
    })
}

fn solver_initial_w(w0: &SpectralField) -> SpectralField {
    nssl_spectral::leray_project(w0)
}
