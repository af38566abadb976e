//! Picard mode: zero data collapses immediately, small data on a short
//! horizon contracts geometrically, and the limit matches the direct solver.

use nssl_ins3d::{
    picard_solve, record_background, Background, Ins3dSolver, PicardParams, StepParams,
};
use nssl_spectral::{leray_project, Grid, PhysicalField, SpectralField};

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z = z ^ (z >> 31);
    (z >> 11) as f64 / (1u64 << 53) as f64
}

fn random_w(grid: &Grid, k_max: i64, amplitude: f64, seed: u64) -> SpectralField {
    let mut state = seed;
    let mut f = SpectralField::zeros(grid, 3);
    let dims = grid.dims().to_vec();
    for m0 in -k_max..=k_max {
        for m1 in -k_max..=k_max {
            for m2 in -k_max..=k_max {
                if m0 == 0 && m1 == 0 && m2 == 0 {
                    continue;
                }
                let idx = [
                    m0.rem_euclid(dims[0] as i64) as usize,
                    m1.rem_euclid(dims[1] as i64) as usize,
                    m2.rem_euclid(dims[2] as i64) as usize,
                ];
                let midx = [
                    (-m0).rem_euclid(dims[0] as i64) as usize,
                    (-m1).rem_euclid(dims[1] as i64) as usize,
                    (-m2).rem_euclid(dims[2] as i64) as usize,
                ];
                let flat = grid.ravel(&idx);
                let mflat = grid.ravel(&midx);
                for c in 0..3 {
                    let val = nssl_spectral::Complex64::new(
                        splitmix(&mut state) - 0.5,
                        splitmix(&mut state) - 0.5,
                    );
                    f.coeffs[c][flat] += val;
                    f.coeffs[c][mflat] += val.conj();
                }
            }
        }
    }
    let mut f = leray_project(&f);
    let max = f.to_physical().max_magnitude();
    f.scale(amplitude / max);
    f
}

fn setup(n: usize) -> (Grid, Grid, SpectralField) {
    let grid3 = Grid::square_2pi(3, n).unwrap();
    let grid2 = Grid::square_2pi(2, n).unwrap();
    let v2d0 = PhysicalField::fill(&grid2, 3, |c, x| {
        0.35 * match c {
            0 => -x[0].cos() * x[1].sin(),
            1 => x[0].sin() * x[1].cos(),
            _ => 0.5 * x[1].sin(),
        }
    })
    .to_spectral();
    (grid3, grid2, v2d0)
}

#[test]
fn zero_data_collapses_at_the_first_level() {
    let (grid3, _, v2d0) = setup(16);
    let params = PicardParams {
        dt: 5e-3,
        nsteps: 10,
        n_max: 4,
        tol: 1e-14,
        ..Default::default()
    };
    let background = record_background(&v2d0, params.dt, params.nsteps).unwrap();
    let run = picard_solve(
        &SpectralField::zeros(&grid3, 1),
        &SpectralField::zeros(&grid3, 3),
        &background,
        &params,
    )
    .unwrap();
    assert!(run.converged);
    assert_eq!(run.levels_run, 1);
    assert!(run.i_history[0] <= 1e-14);
}

#[test]
fn small_data_contracts_and_matches_direct_solver() {
    let n = 24;
    let (grid3, _, v2d0) = setup(n);
    let h0 = PhysicalField::fill(&grid3, 1, |_, x| {
        let c = std::f64::consts::PI;
        let r2 = (x[0] - c).powi(2) + (x[1] - c).powi(2) + (x[2] - c).powi(2);
        0.05 * (-r2 / 1.0).exp()
    })
    .to_spectral();
    let w0 = random_w(&grid3, 2, 0.02, 77);

    let params = PicardParams {
        dt: 5e-3,
        nsteps: 40,
        n_max: 7,
        tol: 1e-24,
        ..Default::default()
    };
    let background = record_background(&v2d0, params.dt, params.nsteps).unwrap();
    let run = picard_solve(&h0, &w0, &background, &params).unwrap();
    assert!(run.i_history.len() >= 4, "history {:?}", run.i_history);

    // Geometric decay: I_{n+1}/I_n ≤ 0.75 once n ≥ 2.
    for k in 1..run.i_history.len() - 1 {
        let ratio = run.i_history[k + 1] / run.i_history[k];
        assert!(
            ratio <= 0.75,
            "I ratio {ratio:.3} at level {k} (history {:?})",
            run.i_history
        );
    }

    // The Picard limit shadows the direct solver within 10× its truncation.
    let t_end = params.dt * params.nsteps as f64;
    let run_direct = |dt: f64| -> SpectralField {
        let background = Background::live(&v2d0).unwrap();
        let sp = StepParams {
            dt,
            ..Default::default()
        };
        let mut solver = Ins3dSolver::new(&h0, &w0, background, sp).unwrap();
        let nsteps = (t_end / dt).round() as usize;
        for _ in 0..nsteps {
            solver.step().unwrap();
        }
        solver.w
    };
    let w_direct = run_direct(params.dt);
    let w_direct_fine = run_direct(0.5 * params.dt);
    let truncation = w_direct.l2_distance(&w_direct_fine);
    let w_picard = run.final_level.w.last().unwrap();
    let gap = w_picard.l2_distance(&w_direct);
    let i_tail = run.i_history.last().unwrap().sqrt();
    let allowed = (10.0 * truncation).max(10.0 * i_tail);
    assert!(
        gap <= allowed,
        "picard-direct gap {gap:.3e} vs allowance {allowed:.3e} (truncation {truncation:.3e})"
    );
}
