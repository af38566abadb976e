//! The 2D background as seen by the 3D solver: constant extension in x₃
//! (only the x₃-wavenumber-zero modes are populated), with the time
//! derivative taken spectrally from the 2D momentum balance.

use crate::error::{Ins3dError, Result};
use nssl_hns2d::{time_derivative, Hns2dSolver, Hns2dState};
use nssl_spectral::{Grid, PhysicalField, SpectralField};

/// Check the 3D grid's horizontal axes against the background grid.
pub fn check_grids(grid3: &Grid, grid2: &Grid) -> Result<()> {
    let ok = grid3.ndim() == 3
        && grid2.ndim() == 2
        && grid3.dims()[0] == grid2.dims()[0]
        && grid3.dims()[1] == grid2.dims()[1]
        && grid3.box_lengths()[0] == grid2.box_lengths()[0]
        && grid3.box_lengths()[1] == grid2.box_lengths()[1];
    if ok {
        Ok(())
    } else {
        Err(Ins3dError::GridMismatch)
    }
}

/// Tile 2D physical samples along the x₃ axis.
pub fn broadcast_physical(field2: &PhysicalField, grid3: &Grid) -> PhysicalField {
    let n2 = grid3.dims()[2];
    let mut out = PhysicalField::zeros(grid3, field2.ncomp());
    for c in 0..field2.ncomp() {
        let src = &field2.data[c];
        let dst = &mut out.data[c];
        for (h_idx, &v) in src.iter().enumerate() {
            let base = h_idx * n2;
            dst[base..base + n2].fill(v);
        }
    }
    out
}

/// Populate the x₃-zero modes of a 3D field from a 2D one.
pub fn extend_spectral(field2: &SpectralField, grid3: &Grid) -> SpectralField {
    let n2 = grid3.dims()[2];
    let mut out = SpectralField::zeros(grid3, field2.ncomp());
    for c in 0..field2.ncomp() {
        for (h_idx, &v) in field2.coeffs[c].iter().enumerate() {
            out.coeffs[c][h_idx * n2] = v;
        }
    }
    out
}

/// One recorded background time level.
#[derive(Debug, Clone)]
pub struct BackgroundStep {
    pub t: f64,
    pub v: SpectralField,
    pub v_t: SpectralField,
}

/// Background supplier: either a live 2D solver advanced in lockstep with
/// the 3D stepper, or a stored per-step trajectory (used by the Picard mode,
/// where every level replays the same background).
pub enum Background {
    Live {
        solver: Box<Hns2dSolver>,
        v_t: SpectralField,
    },
    Stored {
        steps: Vec<BackgroundStep>,
        cursor: usize,
    },
}

impl Background {
    pub fn live(v0_2d: &SpectralField) -> Result<Self> {
        let state = Hns2dState::new(v0_2d)?;
        let v_t = time_derivative(&state.v);
        Ok(Background::Live {
            solver: Box::new(Hns2dSolver::new(state)),
            v_t,
        })
    }

    pub fn stored(steps: Vec<BackgroundStep>) -> Self {
        assert!(!steps.is_empty());
        Background::Stored { steps, cursor: 0 }
    }

    pub fn current(&self) -> (&SpectralField, &SpectralField) {
        match self {
            Background::Live { solver, v_t } => (&solver.state.v, v_t),
            Background::Stored { steps, cursor } => (&steps[*cursor].v, &steps[*cursor].v_t),
        }
    }

    pub fn t(&self) -> f64 {
        match self {
            Background::Live { solver, .. } => solver.state.t,
            Background::Stored { steps, cursor } => steps[*cursor].t,
        }
    }

    pub fn advance(&mut self, dt: f64) -> Result<()> {
        match self {
            Background::Live { solver, v_t } => {
                solver.step(dt)?;
                *v_t = time_derivative(&solver.state.v);
                Ok(())
            }
            Background::Stored { steps, cursor } => {
                if *cursor + 1 >= steps.len() {
                    return Err(Ins3dError::GridMismatch);
                }
                let expected = steps[*cursor].t + dt;
                if (steps[*cursor + 1].t - expected).abs() > 1e-9 {
                    return Err(Ins3dError::GridMismatch);
                }
                *cursor += 1;
                Ok(())
            }
        }
    }

    pub fn reset(&mut self) {
        if let Background::Stored { cursor, .. } = self {
            *cursor = 0;
        }
    }
}

/// Record a per-step background trajectory over `nsteps` steps of `dt`.
pub fn record_background(v0_2d: &SpectralField, dt: f64, nsteps: usize) -> Result<Vec<BackgroundStep>> {
    let state = Hns2dState::new(v0_2d)?;
    let mut solver = Hns2dSolver::new(state);
    let mut steps = Vec::with_capacity(nsteps + 1);
    steps.push(BackgroundStep {
        t: 0.0,
        v: solver.state.v.clone(),
        v_t: time_derivative(&solver.state.v),
    });
    for _ in 0..nsteps {
        solver.step(dt)?;
        steps.push(BackgroundStep {
            t: solver.state.t,
            v: solver.state.v.clone(),
            v_t: time_derivative(&solver.state.v),
        });
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn broadcast_and_extension_agree() {
        let g2 = Grid::square_2pi(2, 8).unwrap();
        let g3 = Grid::square_2pi(3, 8).unwrap();
        let f2 = PhysicalField::fill(&g2, 3, |c, x| (c as f64 + 1.0) * x[0].sin() * x[1].cos());
        let tiled = broadcast_physical(&f2, &g3);
        let extended = extend_spectral(&f2.to_spectral(), &g3).to_physical();
        for c in 0..3 {
            for (a, b) in tiled.data[c].iter().zip(&extended.data[c]) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stored_background_replays_live() {
        let g2 = Grid::square_2pi(2, 16).unwrap();
        let v0 = PhysicalField::fill(&g2, 3, |c, x| match c {
            0 => -x[0].cos() * x[1].sin(),
            1 => x[0].sin() * x[1].cos(),
            _ => 0.3 * x[0].sin(),
        })
        .to_spectral();
        let dt = 0.01;
        let steps = record_background(&v0, dt, 5).unwrap();
        let mut live = Background::live(&v0).unwrap();
        let mut stored = Background::stored(steps);
        for _ in 0..5 {
            live.advance(dt).unwrap();
            stored.advance(dt).unwrap();
            let (vl, vtl) = live.current();
            let (vs, vts) = stored.current();
            assert!(vl.l2_distance(vs) < 1e-14);
            assert!(vtl.l2_distance(vts) < 1e-14);
        }
    }
}
