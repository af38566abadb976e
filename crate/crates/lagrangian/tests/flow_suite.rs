//! Flow-map invariants under a fully 3D divergence-free field, the
//! gridded-sampler cross-check, and the kinematic density-freeze identity.

use nssl_lagrangian::{
    euler_lagrange_consistency, rigid_rotation, AnalyticVelocity, EulerianSnapshot,
    FlowIntegrator, PointVelocity, SampledVelocity, VelocitySnapshot,
};
use nssl_spectral::{Grid, PhysicalField};

fn abc_flow(
    amp: f64,
) -> AnalyticVelocity<impl Fn(f64, &[f64; 3]) -> [f64; 3] + Sync, impl Fn(f64, &[f64; 3]) -> [[f64; 3]; 3] + Sync>
{
    let (a, b, c) = (amp, 0.8 * amp, 0.6 * amp);
    AnalyticVelocity {
        velocity: move |_t, x: &[f64; 3]| {
            [
                a * x[2].sin() + c * x[1].cos(),
                b * x[0].sin() + a * x[2].cos(),
                c * x[1].sin() + b * x[0].cos(),
            ]
        },
        jacobian: move |_t, x: &[f64; 3]| {
            [
                [0.0, -c * x[1].sin(), a * x[2].cos()],
                [b * x[0].cos(), 0.0, -a * x[2].sin()],
                [-b * x[0].sin(), c * x[1].cos(), 0.0],
            ]
        },
    }
}

#[test]
fn flow_map_invariants_inside_certified_window() {
    let labels = Grid::square_2pi(3, 16).unwrap();
    let velocity = abc_flow(0.25);
    let mut integ = FlowIntegrator::new(&labels, &velocity);
    let dt = 5e-3;
    let mut max_grad_v = 0.0f64;
    for _ in 0..200 {
        integ.step(dt);
        // Eulerian Lipschitz norm for the growth bound: max over the grid of
        // ‖∇v‖_F (steady field, so compute once is fine).
        let g = velocity.jacobian(0.0, &[0.3, 1.1, 2.0]);
        let mut f = 0.0;
        for row in &g {
            for &e in row {
                f += e * e;
            }
        }
        max_grad_v = max_grad_v.max(f.sqrt());
    }
    let state = &integ.state;
    assert!(state.t > 0.99 && state.t < 1.01);
    assert!(state.certified, "budget {}", state.lip_budget);
    assert!(state.lip_budget <= 0.5);

    // Volume preservation.
    assert!(
        state.max_det_deviation() <= 1e-6,
        "det deviation {:.3e}",
        state.max_det_deviation()
    );

    // ∇X·A = Id inside the certified region.
    let a = state.inverse_jacobian_series(24).unwrap();
    let prod = state.grad_x.matmul(&a);
    assert!(
        prod.max_deviation_from_identity() <= 1e-8,
        "∇X·A − Id = {:.3e}",
        prod.max_deviation_from_identity()
    );

    // ‖A − Id‖ ≤ 2·budget.
    assert!(
        a.max_deviation_from_identity() <= 2.0 * state.lip_budget,
        "A − Id {:.4} vs 2·budget {:.4}",
        a.max_deviation_from_identity(),
        2.0 * state.lip_budget
    );

    // Growth bound ‖∇X(t)‖ ≤ exp(∫‖∇v‖_∞) within 5%. The Eulerian budget
    // bounds the Lagrangian one for steady fields through the sup norm.
    let eulerian_budget = {
        // max over a fine probe of ‖∇v‖_F
        let mut worst = 0.0f64;
        for i in 0..40 {
            for j in 0..40 {
                for k in 0..40 {
                    let x = [
                        i as f64 * 0.157, // 2π/40
                        j as f64 * 0.157,
                        k as f64 * 0.157,
                    ];
                    let g = velocity.jacobian(0.0, &x);
                    let mut f = 0.0;
                    for row in &g {
                        for &e in row {
                            f += e * e;
                        }
                    }
                    worst = worst.max(f.sqrt());
                }
            }
        }
        worst * state.t
    };
    let bound = eulerian_budget.exp();
    // max Frobenius of ∇X includes the identity part (√3); compare operator
    // growth via ‖∇X‖_F/√3.
    let growth = state.grad_x.max_frobenius() / 3.0f64.sqrt();
    assert!(
        growth <= 1.05 * bound,
        "growth {growth:.4} vs bound {bound:.4}"
    );
}

#[test]
fn sampled_velocity_reproduces_analytic_flow() {
    let labels = Grid::square_2pi(3, 12).unwrap();
    let velocity = abc_flow(0.2);
    // Gridded snapshots of the same steady field on a finer grid.
    let field_grid = Grid::square_2pi(3, 32).unwrap();
    let v_phys = PhysicalField::fill(&field_grid, 3, |c, x| velocity.velocity(0.0, x)[c]);
    let snapshot = VelocitySnapshot::from_spectral(0.0, &v_phys.to_spectral());
    let sampled = SampledVelocity::new(vec![snapshot]);

    let dt = 5e-3;
    let mut exact = FlowIntegrator::new(&labels, &velocity);
    let mut gridded = FlowIntegrator::new(&labels, &sampled);
    for _ in 0..100 {
        exact.step(dt);
        gridded.step(dt);
    }
    let mut worst = 0.0f64;
    for c in 0..3 {
        for (a, b) in exact.state.displacement.data[c]
            .iter()
            .zip(&gridded.state.displacement.data[c])
        {
            worst = worst.max((a - b).abs());
        }
    }
    // Spectral field is smooth; cubic interpolation at 32³ carries ~1e−5
    // error and the trajectories shadow it.
    assert!(worst < 5e-5, "sampled-vs-analytic gap {worst:.3e}");
}

#[test]
fn density_is_frozen_along_the_flow() {
    // Kinematic identity: transport h by a rigid rotation, pull back along
    // the computed flow map, and compare with h₀.
    let labels = Grid::square_2pi(2, 48).unwrap();
    let center = [std::f64::consts::PI, std::f64::consts::PI];
    let omega = 0.6;
    let velocity = rigid_rotation(omega, center);

    let h_at = |t: f64| -> PhysicalField {
        PhysicalField::fill(&labels, 1, |_, x| {
            let (c, s) = ((omega * t).cos(), (omega * t).sin());
            // rotate backwards by ωt around the center
            let dx = x[0] - center[0];
            let dy = x[1] - center[1];
            let y0 = c * dx + s * dy;
            let y1 = -s * dx + c * dy;
            0.3 * (-(y0 * y0 + y1 * y1) / 0.5).exp()
        })
    };

    let dt = 2.5e-3;
    let nrecords = 4;
    let steps_per_record = 40;
    let mut integ = FlowIntegrator::new(&labels, &velocity);
    let zero_scalar = PhysicalField::zeros(&labels, 1);
    let zero_vec = PhysicalField::zeros(&labels, 2);
    let mut eulerian = vec![EulerianSnapshot {
        t: 0.0,
        h: h_at(0.0),
        w: zero_vec.clone(),
        q: zero_scalar.clone(),
        f: zero_vec.clone(),
    }];
    let mut flow = vec![integ.state.clone()];
    for _ in 0..nrecords {
        for _ in 0..steps_per_record {
            integ.step(dt);
        }
        let t = integ.state.t;
        eulerian.push(EulerianSnapshot {
            t,
            h: h_at(t),
            w: zero_vec.clone(),
            q: zero_scalar.clone(),
            f: zero_vec.clone(),
        });
        flow.push(integ.state.clone());
    }
    let report = euler_lagrange_consistency(&eulerian, &flow).unwrap();
    for (t, err) in &report.density_freeze_l2 {
        assert!(*err <= 1e-4, "density freeze error {err:.3e} at t={t}");
    }
    // w ≡ 0: the twisted divergence and the momentum residual vanish.
    for (_, div, _) in &report.divergence_l2 {
        assert!(*div < 1e-12);
    }
    for (_, res, _) in &report.momentum_residual_l2 {
        assert!(*res < 1e-12);
    }
}
