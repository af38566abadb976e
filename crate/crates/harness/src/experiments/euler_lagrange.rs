//! Eulerian ↔ Lagrangian consistency run: advance the perturbation system
//! while integrating the flow map through the same velocity, then measure
//! the frozen-density identity, the flow-coordinate momentum residual, and
//! the twisted divergence constraint.

use super::{select_monitors, ExperimentOutput};
use crate::config::Config;
use crate::error::Result;
use crate::generators;
use nssl_estimates::MonitorReport;
use nssl_ins3d::{extend_spectral, Background, Ins3dSolver};
use nssl_lagrangian::{
    euler_lagrange_consistency, EulerianSnapshot, FlowIntegrator, SampledVelocity,
    VelocitySnapshot,
};
use std::fmt::Write as _;

pub const MONITORS: &[&str] = &[
    "density-freeze",
    "twisted-divergence",
    "momentum-residual",
    "certified-window",
];

pub struct ConsistencyRun {
    pub output: ExperimentOutput,
    /// Mean relative momentum residual over interior records.
    pub mean_residual: f64,
}

pub fn run(config: &Config) -> Result<ExperimentOutput> {
    Ok(run_full(config)?.output)
}

pub fn run_full(config: &Config) -> Result<ConsistencyRun> {
    let (grid3, grid2) = super::ins3d_direct::grids(config)?;
    let v2d0 = generators::velocity(config, "background", &grid2)?;
    let w0 = generators::velocity(config, "initial", &grid3)?;
    let h0 = generators::density(config, "density", &grid3)?;
    let params = super::ins3d_direct::step_params(config)?;
    let t_end = config.require_f64("time.t_end")?;
    let cadence = config.f64("time.cadence", 10.0 * params.dt)?;
    super::cfl_gate(config, &w0, params.dt)?;

    let dt = params.dt;
    let background = Background::live(&v2d0)?;
    let mut solver = Ins3dSolver::new(&h0, &w0, background, params)?;

    let full_v_snapshot = |s: &Ins3dSolver| -> VelocitySnapshot {
        let (v2d, _) = s.background.current();
        let mut v = extend_spectral(v2d, &grid3);
        v.axpy(1.0, &s.w);
        VelocitySnapshot::from_spectral(s.t, &v)
    };
    let eulerian_snapshot = |s: &Ins3dSolver| -> EulerianSnapshot {
        let breakdown = s.forcing_breakdown();
        EulerianSnapshot {
            t: s.t,
            h: s.h.to_physical(),
            w: s.w.to_physical(),
            q: s.q.to_physical(),
            f: breakdown.f_pert,
        }
    };

    let mut flow = FlowIntegrator::new(&grid3, &NullVelocity);
    // The flow map advances in lockstep with the solver through a
    // two-snapshot window (linear in time inside each step).
    let mut flow_states = vec![flow.state.clone()];
    let mut eulerian = vec![eulerian_snapshot(&solver)];
    let steps_per_sample = (cadence / dt).round().max(1.0) as usize;
    let nsamples = (t_end / (steps_per_sample as f64 * dt)).round() as usize;
    let mut window_prev = full_v_snapshot(&solver);
    for _ in 0..nsamples {
        for _ in 0..steps_per_sample {
            solver.step()?;
            let window_next = full_v_snapshot(&solver);
            let sampler = SampledVelocity::new(vec![
                clone_snapshot(&window_prev),
                clone_snapshot(&window_next),
            ]);
            let mut stepper = FlowIntegrator::new(&grid3, &sampler);
            stepper.state = flow.state.clone();
            stepper.step(dt);
            flow.state = stepper.state;
            window_prev = window_next;
        }
        flow_states.push(flow.state.clone());
        eulerian.push(eulerian_snapshot(&solver));
    }

    let report = euler_lagrange_consistency(&eulerian, &flow_states)?;

    let mut output = ExperimentOutput::new();
    for (t, v) in &report.density_freeze_l2 {
        output.series.push(*t, "density_freeze_l2", *v);
    }
    let mut worst_div_rel = 0.0f64;
    for (t, v, scale) in &report.divergence_l2 {
        output.series.push(*t, "twisted_divergence_l2", *v);
        if *scale > 0.0 {
            worst_div_rel = worst_div_rel.max(v / scale);
        }
    }
    let mut residual_acc = 0.0;
    for (t, res, scale) in &report.momentum_residual_l2 {
        let rel = res / scale.max(1e-300);
        output.series.push(*t, "momentum_residual_rel", rel);
        residual_acc += rel;
    }
    let mean_residual = residual_acc / report.momentum_residual_l2.len().max(1) as f64;
    let _ = writeln!(
        output.notes,
        "mean relative momentum residual: {mean_residual:.6e}; lip budget {:.4}",
        flow.state.lip_budget
    );

    let worst_freeze = report
        .density_freeze_l2
        .iter()
        .map(|&(_, v)| v)
        .fold(0.0, f64::max);
    let reports = vec![
        MonitorReport::checked(
            "density-freeze",
            "lagrangian_density_frozen",
            worst_freeze,
            config.f64("tolerances.density_freeze", 1e-4)?,
            0.0,
        ),
        MonitorReport::checked(
            "twisted-divergence",
            "lagrangian_divergence_constraint",
            worst_div_rel,
            config.f64("tolerances.twisted_divergence", 2e-2)?,
            0.0,
        ),
        MonitorReport::report_only(
            "momentum-residual",
            "lagrangian_momentum_residual",
            mean_residual,
            1.0,
        ),
        MonitorReport::checked(
            "certified-window",
            "lipschitz_budget_window",
            flow.state.lip_budget,
            0.5,
            0.0,
        ),
    ];
    output.reports = select_monitors(config, MONITORS, reports)?;
    output.snapshots.push((
        "flow_displacement_final".to_string(),
        flow.state.displacement.clone(),
    ));
    Ok(ConsistencyRun {
        output,
        mean_residual,
    })
}

fn clone_snapshot(s: &VelocitySnapshot) -> VelocitySnapshot {
    VelocitySnapshot {
        t: s.t,
        v: s.v.clone(),
        jac: s.jac.clone(),
    }
}

/// Placeholder sampler for constructing the integrator before the first
/// window exists.
struct NullVelocity;

impl nssl_lagrangian::PointVelocity for NullVelocity {
    fn velocity(&self, _t: f64, _x: &[f64; 3]) -> [f64; 3] {
        [0.0; 3]
    }
    fn jacobian(&self, _t: f64, _x: &[f64; 3]) -> [[f64; 3]; 3] {
        [[0.0; 3]; 3]
    }
}
