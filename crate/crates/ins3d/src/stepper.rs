//! Direct IMEX stepper for the perturbation system.
//!
//! Each step solves the implicit relation `w_t = Δw + P·G(w_t)` (the forcing
//! contains `−h·w_t`) by a Picard sweep whose contraction factor is bounded
//! by `‖h‖_∞ ≤ 1/2`, then advances `w` with the exact diffusion factor and
//! Adams–Bashforth on the projected right side, recovers the pressure from
//! the non-solenoidal part, and transports `h` semi-Lagrangian through the
//! full velocity.

use crate::background::{broadcast_physical, check_grids, Background};
use crate::error::{Ins3dError, Result};
use crate::forcing::{ForcingAssembler, ForcingBreakdown};
use crate::transport::{density_advect_sl, spectral_advection_rhs, DensityScheme};
use nssl_spectral::{divergence, laplacian, leray_project, poisson_solve, Grid, PhysicalField, SpectralField};

#[derive(Debug, Clone)]
pub struct StepParams {
    pub dt: f64,
    pub inner_tol: f64,
    pub inner_max: usize,
    pub cfl_limit: f64,
    pub density_scheme: DensityScheme,
    /// Adams–Bashforth order on the momentum right side (2 or 3).
    pub order: usize,
}

impl Default for StepParams {
    fn default() -> Self {
        StepParams {
            dt: 1e-2,
            inner_tol: 1e-11,
            inner_max: 60,
            cfl_limit: 1.0,
            density_scheme: DensityScheme::SemiLagrangian,
            order: 2,
        }
    }
}

/// Deviation state `(h, w, q)` at one time plus the background handle.
pub struct Ins3dSolver {
    pub grid: Grid,
    pub h: SpectralField,
    pub w: SpectralField,
    pub q: SpectralField,
    pub grad_q: SpectralField,
    pub t: f64,
    pub background: Background,
    pub params: StepParams,
    /// Converged spectral `w_t` at the current time (warm start and monitor).
    pub w_t: SpectralField,
    /// Measured inner-iteration contraction ratios of the last step.
    pub last_contractions: Vec<f64>,
    history: Vec<SpectralField>,
    current_g: SpectralField,
    step_count: usize,
    decay_cache: Option<(f64, Vec<f64>)>,
    /// Spectral advection history for the density (when that scheme is on).
    h_rhs_history: Vec<SpectralField>,
}

impl Ins3dSolver {
    /// Build from initial deviations. `h0` must satisfy `‖h₀‖_∞ ≤ 1/2`; `w0`
    /// is projected onto the divergence constraint.
    pub fn new(
        h0: &SpectralField,
        w0: &SpectralField,
        background: Background,
        params: StepParams,
    ) -> Result<Self> {
        let grid = h0.grid.clone();
        let (v2d, _) = background.current();
        check_grids(&grid, &v2d.grid)?;
        let h_linf = h0.to_physical().max_abs();
        if h_linf > 0.5 {
            return Err(Ins3dError::DensityTooLarge { linf: h_linf });
        }
        let w = leray_project(w0);
        let mut solver = Ins3dSolver {
            grid: grid.clone(),
            h: h0.clone(),
            w,
            q: SpectralField::zeros(&grid, 1),
            grad_q: SpectralField::zeros(&grid, 3),
            t: 0.0,
            background,
            params,
            w_t: SpectralField::zeros(&grid, 3),
            last_contractions: Vec::new(),
            history: Vec::new(),
            current_g: SpectralField::zeros(&grid, 3),
            step_count: 0,
            decay_cache: None,
            h_rhs_history: Vec::new(),
        };
        // Consistent initial w_t and pressure.
        let assembler = solver.assembler();
        let (g, contractions) = solver.solve_inner(&assembler)?;
        solver.finish_pressure(&g)?;
        solver.current_g = g;
        solver.last_contractions = contractions;
        Ok(solver)
    }

    fn assembler(&self) -> ForcingAssembler {
        let (v2d, v2d_t) = self.background.current();
        ForcingAssembler::new(&self.h, &self.w, v2d, v2d_t, &self.grid)
    }

    /// Fixed point for `w_t = Δw + P·G(w_t)`; returns the converged `P·G`
    /// and the per-sweep update ratios. Also stores the converged `w_t`.
    fn solve_inner(&mut self, assembler: &ForcingAssembler) -> Result<(SpectralField, Vec<f64>)> {
        let lap_w = laplacian(&self.w);
        let mut w_t = self.w_t.clone();
        let mut contractions = Vec::new();
        let mut prev_update: Option<f64> = None;
        let h_linf = assembler.h.max_abs();
        let scale = self.w.l2_norm().max(1.0);
        for sweep in 0..self.params.inner_max {
            let g = assembler.stokes_rhs(&w_t.to_physical());
            let pg = leray_project(&g);
            let mut next = lap_w.clone();
            next.axpy(1.0, &pg);
            let update = next.l2_distance(&w_t);
            if let Some(prev) = prev_update {
                if prev > 0.0 {
                    contractions.push(update / prev);
                }
            }
            let converged = update <= self.params.inner_tol * scale;
            w_t = next;
            prev_update = Some(update);
            if converged {
                self.w_t = w_t;
                // Recompute G at the converged w_t for the time integrator.
                let g_final = assembler.stokes_rhs(&self.w_t.to_physical());
                return Ok((g_final, contractions));
            }
            let _ = sweep;
        }
        Err(Ins3dError::InnerNoConvergence {
            sweeps: self.params.inner_max,
            h_linf,
            last: prev_update.unwrap_or(f64::NAN),
        })
    }

    /// Pressure from the converged Stokes right side: `∇q = (I − P)G`,
    /// `q = Δ⁻¹ div G` (zero mean).
    fn finish_pressure(&mut self, g: &SpectralField) -> Result<()> {
        let mut div_g = divergence(g);
        div_g.set_mean(0, 0.0);
        self.q = poisson_solve(&div_g)?;
        self.grad_q = nssl_spectral::gradient(&self.q);
        Ok(())
    }

    fn decay_factors(&mut self, dt: f64) -> Vec<f64> {
        let rebuild = match &self.decay_cache {
            Some((cached, _)) => *cached != dt,
            None => true,
        };
        if rebuild {
            let table = self
                .grid
                .k_sq_table()
                .iter()
                .map(|&k2| (-k2 * dt).exp())
                .collect();
            self.decay_cache = Some((dt, table));
        }
        self.decay_cache.as_ref().unwrap().1.clone()
    }

    /// Full velocity `v = v²ᵈ + w` in physical space.
    pub fn full_velocity_physical(&self) -> PhysicalField {
        let (v2d, _) = self.background.current();
        let mut v = broadcast_physical(&v2d.to_physical(), &self.grid);
        let w_phys = self.w.to_physical();
        for c in 0..3 {
            for (slot, &wv) in v.data[c].iter_mut().zip(&w_phys.data[c]) {
                *slot += wv;
            }
        }
        v
    }

    /// One step of size `params.dt`.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.params.dt;
        let v_phys = self.full_velocity_physical();
        let measured = v_phys.max_magnitude() * dt / self.grid.min_spacing();
        if measured > self.params.cfl_limit {
            return Err(Ins3dError::Cfl {
                measured,
                limit: self.params.cfl_limit,
                t: self.t,
            });
        }

        // The Stokes right side at t_n is already converged (constructor or
        // the previous step's refresh).
        let pg = leray_project(&self.current_g);

        // Density transport through the frozen velocity.
        match self.params.density_scheme {
            DensityScheme::SemiLagrangian | DensityScheme::SemiLagrangianClipped => {
                let clip = self.params.density_scheme == DensityScheme::SemiLagrangianClipped;
                let h_phys = self.h.to_physical();
                let h_new =
                    density_advect_sl(&h_phys, &v_phys, dt, self.params.cfl_limit, clip).map_err(
                        |e| match e {
                            Ins3dError::Cfl {
                                measured, limit, ..
                            } => Ins3dError::Cfl {
                                measured,
                                limit,
                                t: self.t,
                            },
                            other => other,
                        },
                    )?;
                self.h = h_new.to_spectral();
            }
            DensityScheme::Spectral => {
                let rhs = spectral_advection_rhs(&self.h, &v_phys);
                let weights: &[f64] = match self.h_rhs_history.len() {
                    0 => &[1.0],
                    _ => &[1.5, -0.5],
                };
                let mut h_new = self.h.clone();
                h_new.axpy(dt * weights[0], &rhs);
                if weights.len() > 1 {
                    h_new.axpy(dt * weights[1], &self.h_rhs_history[0]);
                }
                self.h_rhs_history.clear();
                self.h_rhs_history.push(rhs);
                self.h = h_new;
            }
        }

        // Momentum update: exact diffusion + AB on P·G.
        let weights: &[f64] = match self.history.len().min(self.params.order - 1) {
            0 => &[1.0],
            1 => &[1.5, -0.5],
            _ => &[23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0],
        };
        let decay = self.decay_factors(dt);
        for c in 0..3 {
            let comp = &mut self.w.coeffs[c];
            for (flat, value) in comp.iter_mut().enumerate() {
                let e = decay[flat];
                let mut acc = *value + dt * weights[0] * pg.coeffs[c][flat];
                let mut e_pow = e;
                for (j, &wgt) in weights.iter().enumerate().skip(1) {
                    let older = &self.history[self.history.len() - j];
                    acc += dt * wgt * e_pow * older.coeffs[c][flat];
                    e_pow *= e;
                }
                *value = e * acc;
            }
        }
        self.w = leray_project(&self.w);
        self.history.push(pg);
        if self.history.len() > self.params.order - 1 {
            self.history.remove(0);
        }

        self.background.advance(dt)?;
        self.t += dt;
        self.step_count += 1;
        if self.w.has_non_finite() || self.h.has_non_finite() {
            return Err(Ins3dError::Diverged {
                step: self.step_count,
            });
        }

        // Refresh w_t and pressure at the new time level (also warm-starts
        // the next step's inner iteration).
        let assembler = self.assembler();
        let (g_new, contractions) = self.solve_inner(&assembler)?;
        self.last_contractions = contractions;
        self.finish_pressure(&g_new)?;
        self.current_g = g_new;
        Ok(())
    }

    /// Forcing breakdown at the current time with the converged `w_t`.
    pub fn forcing_breakdown(&self) -> ForcingBreakdown {
        self.assembler().breakdown(&self.w_t.to_physical())
    }

    pub fn divergence_linf(&self) -> f64 {
        divergence(&self.w).to_physical().max_abs()
    }
}
