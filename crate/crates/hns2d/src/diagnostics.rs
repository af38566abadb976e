//! Per-state diagnostics recorded into a `NormSeries`.
//!
//! Series names:
//! - `energy_l2_sq`, `dissipation_int` (running `∫‖∇_h v‖²`),
//! - `vorticity_lp:<p>`, `v3_linf`,
//! - `grad_v_l2`, `dt_v_l2`, `grad_dt_v_l2`, `grad2_dt_v_l2` (weighted-monitor inputs),
//! - `v_linf`, `grad_v_linf`, `dt_v_linf` (decay-probe inputs),
//! - `cz_ratio:<p>` (`‖∇_h v_h‖_p / ‖ω‖_p`),
//! - `v_mean_drift` (max drift of the velocity mean).

use crate::solver::{time_derivative, Hns2dState};
use nssl_estimates::{gradient_components, lp_norm_physical, NormSeries};
use nssl_spectral::{deriv, SpectralField};

#[derive(Debug, Clone)]
pub struct DiagnosticsConfig {
    pub vorticity_ps: Vec<f64>,
    pub record_linf: bool,
    pub record_weighted: bool,
    pub record_cz: bool,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            vorticity_ps: vec![2.0, 4.0, 6.0],
            record_linf: false,
            record_weighted: true,
            record_cz: false,
        }
    }
}

/// Horizontal vorticity `ω = ∂₁v₂ − ∂₂v₁`.
pub fn vorticity(v: &SpectralField) -> SpectralField {
    let mut w = deriv(&v.component(1), 0);
    w.axpy(-1.0, &deriv(&v.component(0), 1));
    w
}

pub fn record_diagnostics(
    state: &Hns2dState,
    dissipation_int: f64,
    initial_means: &[f64; 3],
    config: &DiagnosticsConfig,
    series: &mut NormSeries,
) {
    let t = state.t;
    let v = &state.v;
    series.push(t, "energy_l2_sq", v.l2_norm().powi(2));
    series.push(t, "dissipation_int", dissipation_int);

    let omega = vorticity(v);
    let omega_phys = omega.to_physical();
    for &p in &config.vorticity_ps {
        series.push(t, &format!("vorticity_lp:{p}"), lp_norm_physical(&omega_phys, p));
    }
    let v_phys = v.to_physical();
    let v3_linf = v_phys.data[2].iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    series.push(t, "v3_linf", v3_linf);

    let drift = (0..3)
        .map(|c| (v.mean(c).re - initial_means[c]).abs())
        .fold(0.0, f64::max);
    series.push(t, "v_mean_drift", drift);

    if config.record_cz {
        let vh = SpectralField::from_components(vec![v.component(0), v.component(1)]);
        let grad_vh = gradient_components(&vh);
        for &p in &config.vorticity_ps {
            let num = lp_norm_physical(&grad_vh.to_physical(), p);
            let den = lp_norm_physical(&omega_phys, p);
            if den > 0.0 {
                series.push(t, &format!("cz_ratio:{p}"), num / den);
            }
        }
    }

    if config.record_weighted || config.record_linf {
        let vt = time_derivative(v);
        let grad_v = gradient_components(v);
        if config.record_weighted {
            let grad_vt = gradient_components(&vt);
            let hess_vt = nssl_estimates::hessian_components(&vt);
            series.push(t, "grad_v_l2", grad_v.l2_norm());
            series.push(t, "dt_v_l2", vt.l2_norm());
            series.push(t, "grad_dt_v_l2", grad_vt.l2_norm());
            series.push(t, "grad2_dt_v_l2", hess_vt.l2_norm());
        }
        if config.record_linf {
            series.push(t, "v_linf", v_phys.max_magnitude());
            series.push(t, "grad_v_linf", grad_v.to_physical().max_magnitude());
            series.push(t, "dt_v_linf", vt.to_physical().max_magnitude());
        }
    }
}
