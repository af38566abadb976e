use nssl_spectral::{
    deriv, laplacian, leray_project, poisson_solve, PhysicalField, SpectralField, SpectralError,
};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Hns2dError {
    #[error("CFL violation: measured {measured:.3} exceeds limit {limit:.3} at t={t:.4}")]
    Cfl { measured: f64, limit: f64, t: f64 },

    #[error("solution diverged (non-finite coefficients) at step {step}")]
    Diverged { step: usize },

    #[error(transparent)]
    Spectral(#[from] SpectralError),

    #[error(transparent)]
    Estimates(#[from] nssl_estimates::EstimatesError),
}

pub type Result<T> = std::result::Result<T, Hns2dError>;

/// Velocity, pressure and clock of the 2D background.
#[derive(Debug, Clone)]
pub struct Hns2dState {
    /// Three components on a 2D grid.
    pub v: SpectralField,
    /// Zero-mean pressure.
    pub p: SpectralField,
    pub t: f64,
}

impl Hns2dState {
    /// Project the data onto the horizontal divergence constraint and attach
    /// the consistent pressure.
    pub fn new(v0: &SpectralField) -> Result<Self> {
        assert_eq!(v0.grid.ndim(), 2, "background lives on a 2D grid");
        assert_eq!(v0.ncomp(), 3, "background velocity has three components");
        let v = leray_project(v0);
        let mut state = Hns2dState {
            p: SpectralField::zeros(&v.grid, 1),
            v,
            t: 0.0,
        };
        let (_, p) = rhs(&state.v)?;
        state.p = p;
        Ok(state)
    }

    pub fn horizontal_divergence_linf(&self) -> f64 {
        let div = nssl_spectral::divergence(&self.v);
        div.to_physical().max_abs()
    }
}

/// Dealiased advection term `N_c = v₁ ∂₁ v_c + v₂ ∂₂ v_c` computed from the
/// already-transformed physical samples of `v`.
fn advection_from_physical(v: &SpectralField, vp: &PhysicalField) -> SpectralField {
    let d1 = deriv(v, 0).to_physical();
    let d2 = deriv(v, 1).to_physical();
    let n = v.grid.len();
    let mut out = PhysicalField::zeros(&v.grid, 3);
    for c in 0..3 {
        let dst = &mut out.data[c];
        for i in 0..n {
            dst[i] = vp.data[0][i] * d1.data[c][i] + vp.data[1][i] * d2.data[c][i];
        }
    }
    let mut spec = out.to_spectral();
    spec.dealias();
    // The mean of the advection term vanishes identically for
    // divergence-free v_h; pin it so the velocity mean is conserved exactly.
    for comp in &mut spec.coeffs {
        comp[0] = Complex64::default();
    }
    spec
}

fn advection(v: &SpectralField) -> SpectralField {
    advection_from_physical(v, &v.to_physical())
}

/// Momentum right side split into the projected part and the pressure.
/// Returns `G = −P_h N` (what the integrating-factor stepper consumes) and
/// the zero-mean pressure with `∇p = −(I − P_h)N` on the horizontal pair.
fn rhs(v: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    let n_term = advection(v);
    let mut g = leray_project(&n_term);
    // Pressure from Δp = −div_h N_h.
    let mut div_n = nssl_spectral::divergence(&n_term);
    div_n.scale(-1.0);
    div_n.coeffs[0][0] = Complex64::default();
    let p = poisson_solve(&div_n)?;
    g.scale(-1.0);
    Ok((g, p))
}

/// Spectrally exact time derivative of the current state,
/// `∂t v = Δ_h v − P_h N` (the pressure gradient cancels the non-solenoidal
/// part of the advection term).
pub fn time_derivative(v: &SpectralField) -> SpectralField {
    let n_term = advection(v);
    let mut out = laplacian(v);
    let mut pn = leray_project(&n_term);
    pn.scale(-1.0);
    out.axpy(1.0, &pn);
    out
}

/// IMEX stepper: exact diffusion factor, Adams–Bashforth advection
/// (order 2 by default, order 3 selectable for tight-drift runs).
pub struct Hns2dSolver {
    pub state: Hns2dState,
    history: Vec<SpectralField>,
    pub cfl_limit: f64,
    pub order: usize,
    step_count: usize,
    decay_cache: Option<(f64, Vec<f64>)>,
}

impl Hns2dSolver {
    pub fn new(state: Hns2dState) -> Self {
        Hns2dSolver {
            state,
            history: Vec::new(),
            cfl_limit: 1.0,
            order: 2,
            step_count: 0,
            decay_cache: None,
        }
    }

    pub fn with_cfl_limit(mut self, limit: f64) -> Self {
        self.cfl_limit = limit;
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        assert!(order == 2 || order == 3, "supported orders are 2 and 3");
        self.order = order;
        self
    }

    /// Measured CFL number `max|v| · dt / Δx` for the current state.
    pub fn cfl(&self, dt: f64) -> f64 {
        let vmax = self.state.v.to_physical().max_magnitude();
        vmax * dt / self.state.v.grid.min_spacing()
    }

    fn decay_factors(&mut self, dt: f64) -> &[f64] {
        let rebuild = match &self.decay_cache {
            Some((cached_dt, _)) => *cached_dt != dt,
            None => true,
        };
        if rebuild {
            let grid = &self.state.v.grid;
            let table = grid
                .k_sq_table()
                .iter()
                .map(|&k2| (-k2 * dt).exp())
                .collect();
            self.decay_cache = Some((dt, table));
        }
        &self.decay_cache.as_ref().unwrap().1
    }

    /// One IMEX step of size `dt`.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let vp = self.state.v.to_physical();
        let measured = vp.max_magnitude() * dt / self.state.v.grid.min_spacing();
        if measured > self.cfl_limit {
            return Err(Hns2dError::Cfl {
                measured,
                limit: self.cfl_limit,
                t: self.state.t,
            });
        }
        let n_term = advection_from_physical(&self.state.v, &vp);
        let mut g = leray_project(&n_term);
        g.scale(-1.0);
        let mut div_n = nssl_spectral::divergence(&n_term);
        div_n.scale(-1.0);
        div_n.coeffs[0][0] = Complex64::default();
        let p = poisson_solve(&div_n)?;

        // Adams-Bashforth weights on (g^n, g^{n−1}, g^{n−2}) with the
        // integrating factor folded in: coefficient j multiplies E^{j+1}·g.
        let weights: &[f64] = match self.history.len().min(self.order - 1) {
            0 => &[1.0],
            1 => &[1.5, -0.5],
            _ => &[23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0],
        };
        let decay = self.decay_factors(dt).to_vec();
        for c in 0..3 {
            let comp = &mut self.state.v.coeffs[c];
            for (flat, value) in comp.iter_mut().enumerate() {
                let e = decay[flat];
                let mut acc = *value + dt * weights[0] * g.coeffs[c][flat];
                let mut e_pow = e;
                for (j, &w) in weights.iter().enumerate().skip(1) {
                    let older = &self.history[self.history.len() - j];
                    acc += dt * w * e_pow * older.coeffs[c][flat];
                    e_pow *= e;
                }
                *value = e * acc;
            }
        }
        // Re-project to hold the constraint against round-off drift.
        self.state.v = leray_project(&self.state.v);
        self.state.p = p;
        self.state.t += dt;
        self.step_count += 1;
        if self.state.v.has_non_finite() {
            return Err(Hns2dError::Diverged {
                step: self.step_count,
            });
        }
        self.history.push(g);
        if self.history.len() > self.order - 1 {
            self.history.remove(0);
        }
        Ok(())
    }
}

/// Time-step to `t_end`, recording diagnostics every `cadence` time units.
/// Returns the final state and the recorded series; the dissipation integral
/// `∫‖∇_h v‖²` accumulates by the trapezoid rule every step.
pub fn solve(
    v0: &SpectralField,
    dt: f64,
    t_end: f64,
    cadence: f64,
    config: &crate::diagnostics::DiagnosticsConfig,
) -> Result<(Hns2dState, nssl_estimates::NormSeries)> {
    solve_with_order(v0, dt, t_end, cadence, config, 2)
}

pub fn solve_with_order(
    v0: &SpectralField,
    dt: f64,
    t_end: f64,
    cadence: f64,
    config: &crate::diagnostics::DiagnosticsConfig,
    order: usize,
) -> Result<(Hns2dState, nssl_estimates::NormSeries)> {
    let state = Hns2dState::new(v0)?;
    let initial_means = [
        state.v.mean(0).re,
        state.v.mean(1).re,
        state.v.mean(2).re,
    ];
    let mut solver = Hns2dSolver::new(state).with_order(order);
    let mut series = nssl_estimates::NormSeries::new();
    // Per-step samples of ‖∇v‖²; the running integral uses the trapezoid rule
    // with the Euler-Maclaurin endpoint correction, so the ledger quadrature
    // error is O(dt⁴) rather than O(dt²).
    let mut grad_sq = vec![solver.state.v.h1_seminorm().powi(2)];
    let mut trap = 0.0;
    let corrected = |trap: f64, samples: &[f64], dt: f64| -> f64 {
        let m = samples.len();
        if m < 3 {
            return trap;
        }
        let f = samples;
        let d_start = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt);
        let d_end = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (2.0 * dt);
        trap - dt * dt / 12.0 * (d_end - d_start)
    };
    crate::diagnostics::record_diagnostics(&solver.state, 0.0, &initial_means, config, &mut series);
    let steps_per_sample = (cadence / dt).round().max(1.0) as usize;
    let nsamples = (t_end / (steps_per_sample as f64 * dt)).round() as usize;
    for _ in 0..nsamples {
        for _ in 0..steps_per_sample {
            solver.step(dt)?;
            let g = solver.state.v.h1_seminorm().powi(2);
            trap += 0.5 * dt * (grad_sq.last().unwrap() + g);
            grad_sq.push(g);
        }
        crate::diagnostics::record_diagnostics(
            &solver.state,
            corrected(trap, &grad_sq, dt),
            &initial_means,
            config,
            &mut series,
        );
    }
    Ok((solver.state, series))
}
