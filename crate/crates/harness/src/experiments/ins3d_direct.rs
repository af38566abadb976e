//! Direct perturbation run with the stability monitors.

use super::{select_monitors, ExperimentOutput};
use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::generators;
use nssl_estimates::MonitorReport;
use nssl_ins3d::{stability_experiment, DensityScheme, StabilityConfig, StepParams};
use nssl_spectral::Grid;
use std::fmt::Write as _;

pub const MONITORS: &[&str] = &[
    "density-bound",
    "deviation-energy-amplification",
    "density-gradient-envelope",
    "smallness-condition",
    "divergence-constraint",
    "inner-contraction",
    "density-l2-conserved",
];

pub fn grids(config: &Config) -> Result<(Grid, Grid)> {
    let n = config.usize("grid.n", 32)?;
    let l = config.f64("grid.box", 2.0 * std::f64::consts::PI)?;
    let grid3 = Grid::new_3d(n, n, n, l, l, l)?;
    let grid2 = Grid::new_2d(n, n, l, l)?;
    Ok((grid3, grid2))
}

pub fn step_params(config: &Config) -> Result<StepParams> {
    let scheme = match config.string("density.scheme", "semi-lagrangian").as_str() {
        "semi-lagrangian" => DensityScheme::SemiLagrangian,
        "semi-lagrangian-clipped" => DensityScheme::SemiLagrangianClipped,
        "spectral" => DensityScheme::Spectral,
        other => {
            return Err(HarnessError::Config {
                line: 0,
                message: format!("density.scheme: unknown scheme `{other}`"),
            })
        }
    };
    Ok(StepParams {
        dt: config.require_f64("time.dt")?,
        inner_tol: config.f64("solver.inner_tol", 1e-11)?,
        inner_max: config.usize("solver.inner_max", 60)?,
        cfl_limit: config.f64("time.cfl_limit", 1.0)?,
        density_scheme: scheme,
        order: config.usize("solver.order", 2)?,
    })
}

pub fn run(config: &Config) -> Result<ExperimentOutput> {
    let (grid3, grid2) = grids(config)?;
    let v2d0 = generators::velocity(config, "background", &grid2)?;
    let w0 = generators::velocity(config, "initial", &grid3)?;
    let h0 = generators::density(config, "density", &grid3)?;
    let params = step_params(config)?;
    let stability = StabilityConfig {
        t_end: config.require_f64("time.t_end")?,
        cadence: config.f64("time.cadence", 10.0 * params.dt)?,
        p: config.f64("stability.p", 4.0)?,
        c0: config.get("stability.c0").map(|v| v.parse().unwrap_or(f64::NAN)),
        c_prime: config
            .get("stability.c_prime")
            .map(|v| v.parse().unwrap_or(f64::NAN)),
        density_slack: config.f64("tolerances.density_bound", 1e-2)?,
    };
    super::cfl_gate(config, &w0, params.dt)?;

    let outcome = stability_experiment(&h0, &w0, &v2d0, params, &stability)?;
    let mut reports = outcome.reports.clone();

    // Divergence constraint at recorded times.
    let tol_div = config.f64("tolerances.divergence", 1e-11)?;
    let worst_div = outcome
        .series
        .get("div_w_linf")
        .iter()
        .map(|&(_, v)| v)
        .fold(0.0, f64::max);
    let w_scale = outcome
        .series
        .get("w_l2")
        .iter()
        .map(|&(_, v)| v)
        .fold(0.0, f64::max)
        .max(1.0);
    reports.push(MonitorReport::checked(
        "divergence-constraint",
        "deviation_divergence_free",
        worst_div,
        tol_div * w_scale,
        0.0,
    ));

    // Inner contraction against the density sup-norm.
    let h_linf0 = outcome
        .series
        .get("h_linf")
        .first()
        .map(|&(_, v)| v)
        .unwrap_or(0.0);
    let worst_contraction = outcome
        .series
        .get("inner_contraction")
        .iter()
        .map(|&(_, v)| v)
        .fold(0.0, f64::max);
    reports.push(MonitorReport::checked(
        "inner-contraction",
        "density_contraction_rate",
        worst_contraction,
        h_linf0 + 0.05,
        0.0,
    ));

    // L2 conservation of the transported density.
    let h_l2 = outcome.series.get("h_l2");
    let h_l2_0 = h_l2.first().map(|&(_, v)| v).unwrap_or(0.0);
    let worst_l2_drift = h_l2
        .iter()
        .map(|&(_, v)| (v - h_l2_0).abs())
        .fold(0.0, f64::max);
    let tol_hl2 = config.f64("tolerances.density_l2", 1e-2)?;
    reports.push(MonitorReport::checked(
        "density-l2-conserved",
        "density_lp_conserved",
        worst_l2_drift,
        tol_hl2 * h_l2_0.max(1e-300),
        0.0,
    ));

    let mut output = ExperimentOutput::new();
    let _ = writeln!(
        output.notes,
        "amplification K = {} (sup_t ‖w‖ + dissipation root over data size)",
        outcome.amplification
    );
    output.series = outcome.series;
    output.reports = select_monitors(config, MONITORS, reports)?;
    Ok(output)
}
