//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Tolerances are pinned here; the heavy 48³ deviation runs are shared
//! between the criteria that consume them.

use nssl_harness::config::Config;
use nssl_harness::experiments;
use nssl_harness::generators;
use nssl_ins3d::{stability_experiment, StabilityConfig, StabilityOutcome, StepParams};
use nssl_spectral::Grid;
use std::sync::OnceLock;

fn pass(id: u32, name: &str, detail: &str) {
    println!("acceptance {id} ({name}): PASS — {detail}");
}

fn parse(text: &str) -> Config {
    Config::parse(text).expect("config parses")
}

fn assert_monitors_pass(output: &experiments::ExperimentOutput, context: &str) {
    let failed = output.failed_monitors();
    assert!(
        failed.is_empty(),
        "{context}: failed monitors {failed:?}\n{}",
        nssl_estimates::render_reports(&output.reports)
    );
}

// ---------------------------------------------------------------------------
// criterion 1: Taylor-Green convergence
// ---------------------------------------------------------------------------
#[test]
fn criterion_1_taylor_green_convergence() {
    let config = parse(
        "experiment.kind = hns2d\n\
         grid.n = 64\n\
         time.dt = 2e-3\n\
         time.t_end = 0.2\n\
         time.cadence = 0.05\n\
         initial.generator = taylor-green\n\
         initial.amplitude = 1.0\n\
         initial.drift_x = 0.3\n\
         initial.drift_y = 0.2\n\
         convergence.dts = 4e-3,2e-3,1e-3\n\
         convergence.t_end = 0.5\n\
         tolerances.tg_order = 1.9\n\
         tolerances.tg_exact = 1e-10\n",
    );
    let output = experiments::dispatch(&config).expect("run");
    assert_monitors_pass(&output, "taylor-green convergence");
    let detail: String = output
        .notes
        .lines()
        .collect::<Vec<_>>()
        .join("; ");
    pass(1, "taylor-green convergence", &detail);
}

// ---------------------------------------------------------------------------
// criterion 2: torus-valid inequality suite
// ---------------------------------------------------------------------------
#[test]
fn criterion_2_inequality_suite() {
    // 2D part at 64² over T = 10.
    let config = parse(
        "experiment.kind = hns2d\n\
         grid.n = 64\n\
         time.dt = 5e-4\n\
         time.t_end = 10\n\
         time.cadence = 0.1\n\
         solver.order = 3\n\
         initial.generator = random-band\n\
         initial.amplitude = 0.8\n\
         initial.seed = 42\n\
         initial.k_min = 0.5\n\
         initial.k_max = 4.5\n\
         tolerances.energy_drift = 1e-6\n\
         tolerances.vorticity_monotone = 1e-3\n\
         tolerances.v3_monotone = 1e-3\n",
    );
    let output = experiments::dispatch(&config).expect("run");
    assert_monitors_pass(&output, "2D inequality suite");
    let energy = output
        .reports
        .iter()
        .find(|r| r.id == "energy-ledger")
        .unwrap();

    // 3D density conservation over T = 10 at 48³ (shared deviation run).
    let outcome = &stability_runs().0;
    let h_l2 = outcome.series.get("h_l2");
    let h0_l2 = h_l2[0].1;
    let worst_l2 = h_l2
        .iter()
        .map(|&(_, v)| (v - h0_l2).abs())
        .fold(0.0, f64::max);
    assert!(
        worst_l2 <= 1e-2 * h0_l2,
        "density L2 drift {worst_l2:.3e} vs {:.3e}",
        1e-2 * h0_l2
    );
    let h_linf = outcome.series.get("h_linf");
    let h0_linf = h_linf[0].1;
    let worst_linf = h_linf.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    assert!(worst_linf <= h0_linf * (1.0 + 1e-2));
    pass(
        2,
        "inequality suite",
        &format!(
            "energy drift {:.3e}; density L2 drift {:.3e} rel, sup-norm factor {:.6}",
            energy.ratio - 1.0,
            worst_l2 / h0_l2,
            worst_linf / h0_linf
        ),
    );
}

// ---------------------------------------------------------------------------
// criterion 3: decay-rate fits on the large box
// ---------------------------------------------------------------------------
#[test]
fn criterion_3_decay_rate_fits() {
    let config = parse("experiment.kind = decay-probe\n");
    let output = experiments::dispatch(&config).expect("run");
    assert_monitors_pass(&output, "decay fits");
    let detail: String = output.notes.lines().collect::<Vec<_>>().join("; ");
    pass(3, "decay-rate fits", &detail);
}

// ---------------------------------------------------------------------------
// criterion 4: Lagrangian suite
// ---------------------------------------------------------------------------
#[test]
fn criterion_4_lagrangian_suite() {
    use nssl_lagrangian::{rigid_rotation, AnalyticVelocity, FlowIntegrator};

    // Rigid rotation, closed-form oracle at t = 1 with dt = 1e-3.
    let labels = Grid::square_2pi(3, 12).unwrap();
    let center = [std::f64::consts::PI, std::f64::consts::PI];
    let velocity = rigid_rotation(1.0, center);
    let mut integ = FlowIntegrator::new(&labels, &velocity);
    for _ in 0..1000 {
        integ.step(1e-3);
    }
    let t = integ.state.t;
    let (c, s) = (t.cos(), t.sin());
    let positions = integ.state.positions();
    let grid = &integ.state.displacement.grid;
    let mut worst = 0.0f64;
    let mut idx = [0usize; 3];
    for (flat, pos) in positions.iter().enumerate() {
        grid.unravel(flat, &mut idx);
        let y = [
            grid.coordinate(0, idx[0]) - center[0],
            grid.coordinate(1, idx[1]) - center[1],
        ];
        let exact = [
            center[0] + c * y[0] - s * y[1],
            center[1] + s * y[0] + c * y[1],
            grid.coordinate(2, idx[2]),
        ];
        for a in 0..3 {
            worst = worst.max((pos[a] - exact[a]).abs());
        }
    }
    assert!(worst <= 1e-8, "rotation flow-map error {worst:.3e}");
    assert!(integ.state.max_det_deviation() <= 1e-6);

    // Certified-region algebra under a genuinely 3D flow.
    let abc = AnalyticVelocity {
        velocity: |_t, x: &[f64; 3]| {
            [
                0.25 * x[2].sin() + 0.15 * x[1].cos(),
                0.2 * x[0].sin() + 0.25 * x[2].cos(),
                0.15 * x[1].sin() + 0.2 * x[0].cos(),
            ]
        },
        jacobian: |_t, x: &[f64; 3]| {
            [
                [0.0, -0.15 * x[1].sin(), 0.25 * x[2].cos()],
                [0.2 * x[0].cos(), 0.0, -0.25 * x[2].sin()],
                [-0.2 * x[0].sin(), 0.15 * x[1].cos(), 0.0],
            ]
        },
    };
    let labels = Grid::square_2pi(3, 16).unwrap();
    let mut integ = FlowIntegrator::new(&labels, &abc);
    for _ in 0..200 {
        integ.step(5e-3);
    }
    let state = &integ.state;
    assert!(state.certified && state.lip_budget <= 0.5);
    let a = state.inverse_jacobian_series(24).unwrap();
    let prod = state.grad_x.matmul(&a);
    let gap = prod.max_deviation_from_identity();
    assert!(gap <= 1e-8, "∇X·A − Id = {gap:.3e}");
    let a_dev = a.max_deviation_from_identity();
    assert!(
        a_dev <= 2.0 * state.lip_budget,
        "‖A − Id‖ = {a_dev:.4} vs 2·budget {:.4}",
        2.0 * state.lip_budget
    );
    assert!(state.max_det_deviation() <= 1e-6);
    pass(
        4,
        "lagrangian suite",
        &format!(
            "rotation error {worst:.2e}; det dev {:.2e}; ∇X·A−Id {gap:.2e}; ‖A−Id‖ {a_dev:.3} ≤ 2·budget {:.3}",
            state.max_det_deviation(),
            2.0 * state.lip_budget
        ),
    );
}

// ---------------------------------------------------------------------------
// criterion 5: twisted-divergence suite
// ---------------------------------------------------------------------------
#[test]
fn criterion_5_twisted_divergence() {
    let mut ledgers = Vec::new();
    let mut detail = String::new();
    for n in [32usize, 48] {
        let grid = Grid::square_2pi(3, n).unwrap();
        let problem =
            experiments::twisted::manufactured(&grid, 0.2, 4, 0.1, nssl_twisted_div::DEFAULT_GATE)
                .unwrap();
        let solution = nssl_twisted_div::solve_fixed_point(&problem, 1e-12, 60).unwrap();
        let g_scale = problem
            .g
            .iter()
            .map(nssl_spectral::SpectralField::l2_norm)
            .fold(0.0, f64::max);
        for h in &solution.history {
            assert!(h.contraction <= 0.25, "contraction {}", h.contraction);
            assert!(
                h.final_residual <= 1e-8 * g_scale.max(1.0),
                "residual {:.3e}",
                h.final_residual
            );
        }
        detail.push_str(&format!(
            "n={n}: contraction {:.3}, residual {:.2e}, z/R {:.4}, gradz/g {:.4}; ",
            solution
                .history
                .iter()
                .map(|h| h.contraction)
                .fold(0.0, f64::max),
            solution
                .history
                .iter()
                .map(|h| h.final_residual)
                .fold(0.0, f64::max),
            solution.ledger.z_over_r,
            solution.ledger.gradz_over_g
        ));
        ledgers.push(solution.ledger);
    }
    for (a, b) in [
        (ledgers[0].z_over_r, ledgers[1].z_over_r),
        (ledgers[0].gradz_over_g, ledgers[1].gradz_over_g),
    ] {
        let rel = (a - b).abs() / b.abs().max(1e-12);
        assert!(rel <= 0.2, "ledger moved {rel:.3} across grids");
    }
    pass(5, "twisted divergence", &detail);
}

// ---------------------------------------------------------------------------
// criterion 6: Picard contraction and path independence
// ---------------------------------------------------------------------------
#[test]
fn criterion_6_picard_contraction() {
    let config = parse(
        "experiment.kind = ins3d-picard\n\
         grid.n = 24\n\
         time.dt = 5e-3\n\
         time.t_end = 0.2\n\
         background.generator = random-band\n\
         background.amplitude = 0.35\n\
         background.seed = 21\n\
         initial.generator = random-band\n\
         initial.amplitude = 0.02\n\
         initial.seed = 77\n\
         density.generator = gaussian-bump\n\
         density.amplitude = 0.05\n\
         density.radius = 1.0\n\
         picard.n_max = 7\n\
         picard.tol = 1e-24\n\
         picard.compare_direct = true\n\
         tolerances.picard_ratio = 0.75\n",
    );
    let output = experiments::dispatch(&config).expect("run");
    assert_monitors_pass(&output, "picard");
    let ratios: Vec<f64> = output
        .series
        .get("picard_contraction_quantity")
        .windows(2)
        .map(|w| w[1].1 / w[0].1)
        .collect();
    pass(
        6,
        "picard contraction",
        &format!("level ratios {ratios:.3?}; {}", output.notes.trim()),
    );
}

// ---------------------------------------------------------------------------
// criterion 7: Euler-Lagrange consistency
// ---------------------------------------------------------------------------
#[test]
fn criterion_7_euler_lagrange_consistency() {
    let base = "experiment.kind = euler-lagrange\n\
         grid.n = 32\n\
         background.generator = taylor-green\n\
         background.amplitude = 0.3\n\
         initial.generator = random-band\n\
         initial.amplitude = 0.05\n\
         initial.seed = 3\n\
         initial.k_max = 2.5\n\
         density.generator = gaussian-bump\n\
         density.amplitude = 0.2\n\
         density.scheme = spectral\n\
         tolerances.density_freeze = 1e-4\n";
    let coarse = parse(&format!(
        "{base}time.dt = 0.02\ntime.t_end = 0.4\ntime.cadence = 0.08\n"
    ));
    let fine = parse(&format!(
        "{base}time.dt = 0.01\ntime.t_end = 0.4\ntime.cadence = 0.04\n"
    ));
    let run_coarse = experiments::euler_lagrange::run_full(&coarse).expect("coarse run");
    let run_fine = experiments::euler_lagrange::run_full(&fine).expect("fine run");
    assert_monitors_pass(&run_fine.output, "euler-lagrange fine level");
    assert_monitors_pass(&run_coarse.output, "euler-lagrange coarse level");
    let order = (run_coarse.mean_residual / run_fine.mean_residual).log2();
    assert!(
        order >= 1.5,
        "momentum residual order {order:.3} ({} -> {})",
        run_coarse.mean_residual,
        run_fine.mean_residual
    );
    let freeze = run_fine
        .output
        .series
        .get("density_freeze_l2")
        .iter()
        .map(|&(_, v)| v)
        .fold(0.0, f64::max);
    pass(
        7,
        "euler-lagrange consistency",
        &format!(
            "density freeze {freeze:.3e} ≤ 1e-4; residual order {order:.2} ({:.3e} -> {:.3e})",
            run_coarse.mean_residual, run_fine.mean_residual
        ),
    );
}

// ---------------------------------------------------------------------------
// criterion 8: stability experiment with linear-response check
// ---------------------------------------------------------------------------
fn stability_runs() -> &'static (StabilityOutcome, StabilityOutcome) {
    static RUNS: OnceLock<(StabilityOutcome, StabilityOutcome)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let run = |amplitude: f64| -> StabilityOutcome {
            let grid3 = Grid::square_2pi(3, 48).unwrap();
            let grid2 = Grid::square_2pi(2, 48).unwrap();
            let v2d0 = generators::random_band(&grid2, 0.4, 21, 0.5, 3.5, 0.0, 0.0);
            let w0 = generators::random_band(&grid3, amplitude, 22, 0.5, 3.5, 0.0, 0.0);
            let h0 = generators::gaussian_bump(&grid3, amplitude, 0.9);
            let params = StepParams {
                dt: 0.02,
                ..Default::default()
            };
            let config = StabilityConfig {
                t_end: 10.0,
                cadence: 0.25,
                p: 4.0,
                c0: None,
                c_prime: None,
                density_slack: 1e-2,
            };
            stability_experiment(&h0, &w0, &v2d0, params, &config).expect("stability run")
        };
        (run(1e-3), run(5e-4))
    })
}

#[test]
fn criterion_8_stability_experiment() {
    let (full, half) = stability_runs();
    for outcome in [full, half] {
        for report in &outcome.reports {
            assert!(
                !report.failed(),
                "stability monitor {} failed\n{}",
                report.id,
                report.render()
            );
        }
        assert!(outcome.amplification.is_finite() && outcome.amplification > 0.0);
        // Divergence constraint at every recorded time.
        let worst_div = outcome
            .series
            .get("div_w_linf")
            .iter()
            .map(|&(_, v)| v)
            .fold(0.0, f64::max);
        assert!(worst_div <= 1e-11, "div w = {worst_div:.3e}");
    }
    let k_ratio = full.amplification / half.amplification;
    assert!(
        (k_ratio - 1.0).abs() <= 0.1,
        "amplification ratio {k_ratio:.4} outside [0.9, 1.1]"
    );
    pass(
        8,
        "stability experiment",
        &format!(
            "K = {:.6} (halved: {:.6}), ratio {:.4}; density bound verdicts pass",
            full.amplification, half.amplification, k_ratio
        ),
    );
}

// ---------------------------------------------------------------------------
// criterion 9: maximal-regularity ratio
// ---------------------------------------------------------------------------
#[test]
fn criterion_9_maxreg_ratio() {
    let config = parse(
        "experiment.kind = stokes-maxreg\n\
         grid.n = 32\n\
         time.dt = 0.04\n\
         maxreg.draws = 10\n\
         maxreg.p = 4\n\
         tolerances.single_mode = 0.02\n\
         tolerances.spread = 2.0\n",
    );
    let output = experiments::dispatch(&config).expect("run");
    assert_monitors_pass(&output, "maxreg");
    let detail: String = output.notes.lines().collect::<Vec<_>>().join("; ");
    pass(9, "maximal-regularity ratio", &detail);
}

// ---------------------------------------------------------------------------
// criterion 10: bitwise determinism
// ---------------------------------------------------------------------------
#[test]
fn criterion_10_determinism() {
    let dir = std::env::temp_dir().join("nssl_acceptance_determinism");
    let _ = std::fs::remove_dir_all(&dir);
    let config_text = "experiment.kind = hns2d\n\
         grid.n = 48\n\
         time.dt = 1e-3\n\
         time.t_end = 0.5\n\
         time.cadence = 0.1\n\
         run.deterministic = true\n\
         initial.generator = random-band\n\
         initial.amplitude = 0.7\n\
         initial.seed = 9\n";
    let config = parse(config_text);
    let (m1, _) = experiments::run_to_directory(&config, &dir.join("a")).expect("first run");
    let (m2, _) = experiments::run_to_directory(&config, &dir.join("b")).expect("second run");
    let csv_a = std::fs::read(dir.join("a/series.csv")).unwrap();
    let csv_b = std::fs::read(dir.join("b/series.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "CSV output is not bitwise reproducible");
    assert!(m1.verify_artifacts().unwrap());
    assert!(m2.verify_artifacts().unwrap());
    let _ = std::fs::remove_dir_all(&dir);
    pass(
        10,
        "determinism",
        &format!("series.csv identical across runs ({} bytes)", csv_a.len()),
    );
}
