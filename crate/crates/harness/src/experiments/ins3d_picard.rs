//! Picard-mode experiment: level-by-level contraction record, with the
//! optional two-route comparison against the direct solver (the
//! reproducibility surrogate for path independence).

use super::{select_monitors, ExperimentOutput};
use crate::config::Config;
use crate::error::Result;
use crate::generators;
use nssl_estimates::MonitorReport;
use nssl_ins3d::{picard_solve, record_background, Background, Ins3dSolver, PicardParams};
use std::fmt::Write as _;

pub const MONITORS: &[&str] = &[
    "picard-contraction",
    "picard-converged",
    "picard-direct-gap",
];

pub fn run(config: &Config) -> Result<ExperimentOutput> {
    let (grid3, grid2) = super::ins3d_direct::grids(config)?;
    let v2d0 = generators::velocity(config, "background", &grid2)?;
    let w0 = generators::velocity(config, "initial", &grid3)?;
    let h0 = generators::density(config, "density", &grid3)?;
    let dt = config.require_f64("time.dt")?;
    let t_end = config.require_f64("time.t_end")?;
    let nsteps = (t_end / dt).round() as usize;
    let params = PicardParams {
        dt,
        nsteps,
        n_max: config.usize("picard.n_max", 7)?,
        tol: config.f64("picard.tol", 1e-24)?,
        inner_tol: config.f64("solver.inner_tol", 1e-11)?,
        inner_max: config.usize("solver.inner_max", 60)?,
        cfl_limit: config.f64("time.cfl_limit", 1.0)?,
    };
    super::cfl_gate(config, &w0, dt)?;

    let background = record_background(&v2d0, dt, nsteps)?;
    let run = picard_solve(&h0, &w0, &background, &params)?;

    let mut output = ExperimentOutput::new();
    for (i, value) in run.i_history.iter().enumerate() {
        output
            .series
            .push((i + 1) as f64, "picard_contraction_quantity", *value);
    }
    let _ = writeln!(
        output.notes,
        "picard levels run: {} (converged: {})",
        run.levels_run, run.converged
    );

    // Geometric contraction once the recursion settles (levels ≥ 2).
    let tol_ratio = config.f64("tolerances.picard_ratio", 0.75)?;
    let mut worst_ratio = 0.0f64;
    for k in 1..run.i_history.len().saturating_sub(1) {
        if run.i_history[k] > 0.0 {
            worst_ratio = worst_ratio.max(run.i_history[k + 1] / run.i_history[k]);
        }
    }
    let mut reports = vec![
        MonitorReport::checked(
            "picard-contraction",
            "picard_geometric_decay",
            worst_ratio,
            tol_ratio,
            0.0,
        ),
        MonitorReport::checked(
            "picard-converged",
            "picard_cauchy",
            if run.converged || run.levels_run == params.n_max {
                0.0
            } else {
                1.0
            },
            0.5,
            0.0,
        ),
    ];

    // Optional cross-route comparison.
    if config.bool("picard.compare_direct", false)? {
        let sp = super::ins3d_direct::step_params(config)?;
        let background = Background::live(&v2d0)?;
        let mut solver = Ins3dSolver::new(&h0, &w0, background, sp)?;
        for _ in 0..nsteps {
            solver.step()?;
        }
        let gap = run
            .final_level
            .w
            .last()
            .unwrap()
            .l2_distance(&solver.w);
        // Truncation scale from dt-halving of the direct route.
        let sp_fine = {
            let mut sp = super::ins3d_direct::step_params(config)?;
            sp.dt *= 0.5;
            sp
        };
        let background = Background::live(&v2d0)?;
        let mut fine = Ins3dSolver::new(&h0, &w0, background, sp_fine)?;
        for _ in 0..2 * nsteps {
            fine.step()?;
        }
        let truncation = solver.w.l2_distance(&fine.w);
        let i_tail = run.i_history.last().copied().unwrap_or(0.0).sqrt();
        let allowance = (10.0 * truncation).max(10.0 * i_tail).max(params.tol);
        let _ = writeln!(
            output.notes,
            "picard-direct gap {gap:.6e}, direct truncation {truncation:.6e}"
        );
        reports.push(MonitorReport::checked(
            "picard-direct-gap",
            "path_independence",
            gap,
            allowance,
            0.0,
        ));
    }

    output.reports = select_monitors(config, MONITORS, reports)?;
    Ok(output)
}
