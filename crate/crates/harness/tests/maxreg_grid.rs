//! Maximal-regularity ratio stability across grids: the measured constant
//! moves by at most a bounded factor between 32³ and 48³ on a random-forcing
//! ensemble (the same horizon-independence property, restated for space).

use nssl_estimates::maxreg_parts;
use nssl_harness::generators::random_band;
use nssl_spectral::{stokes_solve, Forcing, Grid, SpectralField};

#[test]
fn ratio_stable_across_grid_refinement() {
    let mut ratios: Vec<f64> = Vec::new();
    let p = 4.0;
    let dt = 0.05f64;
    let t_end = 2.0f64;
    for n in [32usize, 48] {
        let grid = Grid::square_2pi(3, n).unwrap();
        for draw in 0..3u64 {
            let f = random_band(&grid, 1.0, 300 + draw, 0.5, 3.5, 0.0, 0.0);
            let u0 = SpectralField::zeros(&grid, 3);
            let nsteps = (t_end / dt).round() as usize;
            let traj = stokes_solve(&u0, Forcing::Steady(&f), dt, nsteps).unwrap();
            let parts = maxreg_parts(&traj, &Forcing::Steady(&f), p).unwrap();
            ratios.push(parts.ratio);
        }
    }
    let max = ratios.iter().cloned().fold(0.0f64, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        max / min <= 2.0,
        "ratio spread {:.3} across grids/draws: {ratios:?}",
        max / min
    );
}
