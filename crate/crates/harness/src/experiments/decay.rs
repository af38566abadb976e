//! Decay-probe experiment: worst-case heat rates on a large box, gated by
//! the contamination monitor and cross-validated against the heat oracle.

use super::{select_monitors, ExperimentOutput};
use crate::config::Config;
use crate::error::Result;
use nssl_estimates::MonitorReport;
use nssl_hns2d::{decay_probe, DecayProbeParams};
use std::fmt::Write as _;

pub const MONITORS: &[&str] = &[
    "decay-slope-v",
    "decay-slope-grad-v",
    "decay-slope-dt-v",
    "decay-oracle-gap",
    "decay-contamination",
];

pub fn run(config: &Config) -> Result<ExperimentOutput> {
    let defaults = DecayProbeParams::default();
    let box_length = config.f64("grid.box", defaults.box_length)?;
    let params = DecayProbeParams {
        grid_n: config.usize("grid.n", defaults.grid_n)?,
        box_length,
        k_band: (
            config.f64("probe.k_min", defaults.k_band.0)?,
            config.f64("probe.k_max", defaults.k_band.1)?,
        ),
        envelope_radius: config.f64("probe.envelope_radius", defaults.envelope_radius)?,
        amplitude: config.f64("initial.amplitude", defaults.amplitude)?,
        dt: config.f64("time.dt", defaults.dt)?,
        t_end: config.f64("time.t_end", defaults.t_end)?,
        cadence: config.f64("time.cadence", defaults.cadence)?,
        window: (
            config.f64("probe.window_start", defaults.window.0)?,
            config.f64("probe.window_end", defaults.window.1)?,
        ),
        p_list: config
            .list("probe.p_list")
            .iter()
            .filter_map(|s| s.parse().ok())
            .collect(),
        contamination_limit: config.f64("probe.contamination_limit", 1e-6)?,
    };
    let result = decay_probe(&params)?;

    let mut reports = Vec::new();
    let mut notes = String::new();
    let targets = [
        ("v_linf", "decay-slope-v", -0.5, 0.1),
        ("grad_v_linf", "decay-slope-grad-v", -1.0, 0.1),
        ("dt_v_linf", "decay-slope-dt-v", -1.5, 0.15),
    ];
    let mut worst_oracle_gap = 0.0f64;
    for (name, id, target, tol) in targets {
        let fit = &result.fits.iter().find(|(n, _)| n == name).unwrap().1;
        let oracle = &result.oracle_fits.iter().find(|(n, _)| n == name).unwrap().1;
        let _ = writeln!(
            notes,
            "{name}: slope {:.5} oracle {:.5} r2 {:.6} window {:?}{}",
            fit.slope,
            oracle.slope,
            fit.r2,
            fit.window,
            if fit.contaminated { " (truncated)" } else { "" }
        );
        reports.push(MonitorReport::checked(
            id,
            "heat_rate_decay",
            (fit.slope - target).abs(),
            tol,
            0.0,
        ));
        worst_oracle_gap = worst_oracle_gap.max((fit.slope - oracle.slope).abs());
    }
    reports.push(MonitorReport::checked(
        "decay-oracle-gap",
        "heat_oracle_shadowing",
        worst_oracle_gap,
        config.f64("tolerances.oracle_gap", 0.02)?,
        0.0,
    ));
    reports.push(match result.contamination_time {
        None => MonitorReport::checked("decay-contamination", "boundary_contamination", 0.0, 1.0, 0.0),
        Some(t) => {
            let _ = writeln!(notes, "contamination tripped at t = {t}");
            MonitorReport::report_only("decay-contamination", "boundary_contamination", t, params.t_end)
        }
    });

    let mut output = ExperimentOutput::new();
    output.series = result.series;
    output.reports = select_monitors(config, MONITORS, reports)?;
    output.notes = notes;
    Ok(output)
}
