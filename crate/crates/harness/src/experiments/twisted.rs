//! Twisted-divergence experiment on a manufactured volume-preserving twist.

use super::{select_monitors, ExperimentOutput};
use crate::config::Config;
use crate::error::Result;
use nssl_estimates::MonitorReport;
use nssl_spectral::{divergence, Grid, PhysicalField, SpectralField};
use nssl_twisted_div::{shear_twist, solve_fixed_point, TwistedDivProblem, DEFAULT_GATE};
use std::fmt::Write as _;

pub const MONITORS: &[&str] = &[
    "twist-contraction",
    "twist-residual",
    "twisted-div-gate",
    "twisted-div-contraction",
    "twisted-div-residual",
    "twisted-div-z-bound",
    "twisted-div-gradz-bound",
    "twisted-div-zt-bound",
];

fn smooth_z_star(grid: &Grid) -> SpectralField {
    PhysicalField::fill(grid, 3, |c, x| match c {
        0 => x[1].sin() * (0.5 * x[2]).cos(),
        1 => (2.0 * x[2]).cos() + 0.3 * x[0].sin(),
        _ => x[0].cos() * x[1].sin(),
    })
    .to_spectral()
}

/// Manufactured volume-preserving problem: composed shears calibrated so
/// `max_t ‖Id − A(t)‖_∞` equals `deviation`, `R = A z*` for a smooth `z*`,
/// `g = div R`.
pub fn manufactured(grid: &Grid, deviation: f64, nt: usize, slice_dt: f64, gate: f64) -> Result<TwistedDivProblem> {
    let probe = 0.1;
    let mut worst = 0.0f64;
    for i in 0..nt {
        let a = shear_twist(grid, probe, i as f64 * slice_dt);
        worst = worst.max(a.max_deviation_from_identity());
    }
    let strength = probe * deviation / worst;

    let z_star = smooth_z_star(grid);
    let z_phys = z_star.to_physical();
    let times: Vec<f64> = (0..nt).map(|i| i as f64 * slice_dt).collect();
    let mut a_traj = Vec::new();
    let mut r_traj = Vec::new();
    let mut g_traj = Vec::new();
    for &t in &times {
        let a = shear_twist(grid, strength, t);
        let mut r = a.apply(&z_phys).to_spectral();
        r.dealias();
        let g = divergence(&r);
        a_traj.push(a);
        r_traj.push(r);
        g_traj.push(g);
    }
    let mut rt_traj = Vec::new();
    for i in 0..nt {
        let (j0, j1) = if nt == 1 {
            (0, 0)
        } else if i == 0 {
            (0, 1)
        } else if i == nt - 1 {
            (nt - 2, nt - 1)
        } else {
            (i - 1, i + 1)
        };
        if j0 == j1 {
            rt_traj.push(SpectralField::zeros(grid, 3));
        } else {
            let mut rt = r_traj[j1].clone();
            rt.axpy(-1.0, &r_traj[j0]);
            rt.scale(1.0 / (times[j1] - times[j0]));
            rt_traj.push(rt);
        }
    }
    Ok(TwistedDivProblem::new(times, a_traj, g_traj, r_traj, rt_traj, gate)?)
}

pub fn run(config: &Config) -> Result<ExperimentOutput> {
    let n = config.usize("grid.n", 32)?;
    let l = config.f64("grid.box", 2.0 * std::f64::consts::PI)?;
    let grid = Grid::new_3d(n, n, n, l, l, l)?;
    let deviation = config.f64("twist.deviation", 0.2)?;
    let nt = config.usize("time.slices", 4)?;
    let slice_dt = config.f64("time.dt", 0.1)?;
    let gate = config.f64("twist.gate", DEFAULT_GATE)?;
    let tol = config.f64("solver.tol", 1e-12)?;
    let max_sweeps = config.usize("solver.max_sweeps", 60)?;

    let problem = manufactured(&grid, deviation, nt, slice_dt, gate)?;
    let times = problem.times.clone();
    let solution = solve_fixed_point(&problem, tol, max_sweeps)?;

    let mut output = ExperimentOutput::new();
    let g_scale = problem
        .g
        .iter()
        .map(SpectralField::l2_norm)
        .fold(0.0, f64::max);
    for (i, h) in solution.history.iter().enumerate() {
        output.series.push(times[i], "twist_sweeps", h.sweeps as f64);
        output
            .series
            .push(times[i], "twist_contraction", h.contraction);
        output
            .series
            .push(times[i], "twist_residual", h.final_residual);
    }
    let worst_contraction = solution
        .history
        .iter()
        .map(|h| h.contraction)
        .fold(0.0, f64::max);
    let worst_residual = solution
        .history
        .iter()
        .map(|h| h.final_residual)
        .fold(0.0, f64::max);
    let mut reports = vec![
        MonitorReport::checked(
            "twist-contraction",
            "twist_contraction_factor",
            worst_contraction,
            config.f64("tolerances.contraction", deviation + 0.05)?,
            0.0,
        ),
        MonitorReport::checked(
            "twist-residual",
            "twist_residual_l2",
            worst_residual,
            config.f64("tolerances.residual", 1e-8)? * g_scale.max(1.0),
            0.0,
        ),
    ];
    reports.extend(solution.reports());
    let _ = writeln!(
        output.notes,
        "ledger: z/R = {}, gradz/g = {}, zt sum-space {} over {}",
        solution.ledger.z_over_r,
        solution.ledger.gradz_over_g,
        solution.ledger.zt_sumspace.total,
        solution.ledger.zt_denominator
    );
    output.reports = select_monitors(config, MONITORS, reports)?;
    Ok(output)
}
