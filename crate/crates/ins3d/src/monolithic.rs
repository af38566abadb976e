//! Constant-density 3D Navier-Stokes solver: the `h = 0` oracle against
//! which the perturbation route is cross-checked.

use crate::error::{Ins3dError, Result};
use nssl_spectral::{deriv, leray_project, PhysicalField, SpectralField};

pub struct MonolithicSolver {
    pub v: SpectralField,
    pub t: f64,
    pub cfl_limit: f64,
    history: Vec<SpectralField>,
    step_count: usize,
    decay_cache: Option<(f64, Vec<f64>)>,
}

impl MonolithicSolver {
    pub fn new(v0: &SpectralField) -> Self {
        assert_eq!(v0.grid.ndim(), 3);
        assert_eq!(v0.ncomp(), 3);
        MonolithicSolver {
            v: leray_project(v0),
            t: 0.0,
            cfl_limit: 1.0,
            history: Vec::new(),
            step_count: 0,
            decay_cache: None,
        }
    }

    fn advection(&self, vp: &PhysicalField) -> SpectralField {
        let grid = self.v.grid.clone();
        let n = grid.len();
        let mut derivs = Vec::with_capacity(3);
        for j in 0..3 {
            derivs.push(deriv(&self.v, j).to_physical());
        }
        let mut out = PhysicalField::zeros(&grid, 3);
        for c in 0..3 {
            let dst = &mut out.data[c];
            for i in 0..n {
                let mut acc = 0.0;
                for (j, dj) in derivs.iter().enumerate() {
                    acc += vp.data[j][i] * dj.data[c][i];
                }
                dst[i] = acc;
            }
        }
        let mut spec = out.to_spectral();
        spec.dealias();
        for comp in &mut spec.coeffs {
            comp[0] = nssl_spectral::Complex64::new(0.0, 0.0);
        }
        spec
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        let vp = self.v.to_physical();
        let measured = vp.max_magnitude() * dt / self.v.grid.min_spacing();
        if measured > self.cfl_limit {
            return Err(Ins3dError::Cfl {
                measured,
                limit: self.cfl_limit,
                t: self.t,
            });
        }
        let mut g = leray_project(&self.advection(&vp));
        g.scale(-1.0);
        let rebuild = match &self.decay_cache {
            Some((cached, _)) => *cached != dt,
            None => true,
        };
        if rebuild {
            let table = self
                .v
                .grid
                .k_sq_table()
                .iter()
                .map(|&k| (-k * dt).exp())
                .collect();
            self.decay_cache = Some((dt, table));
        }
        let decay = self.decay_cache.as_ref().unwrap().1.clone();
        let weights: &[f64] = if self.history.is_empty() {
            &[1.0]
        } else {
            &[1.5, -0.5]
        };
        for c in 0..3 {
            let comp = &mut self.v.coeffs[c];
            for (flat, value) in comp.iter_mut().enumerate() {
                let e = decay[flat];
                let mut acc = *value + dt * weights[0] * g.coeffs[c][flat];
                if weights.len() > 1 {
                    acc += dt * weights[1] * e * self.history[self.history.len() - 1].coeffs[c][flat];
                }
                *value = e * acc;
            }
        }
        self.v = leray_project(&self.v);
        self.history.push(g);
        if self.history.len() > 1 {
            self.history.remove(0);
        }
        self.t += dt;
        self.step_count += 1;
        if self.v.has_non_finite() {
            return Err(Ins3dError::Diverged {
                step: self.step_count,
            });
        }
        Ok(())
    }
}
