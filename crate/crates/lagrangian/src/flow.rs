//! Flow-map integration on a label grid: RK4 on `dX/dt = v(t, X)` with the
//! Jacobian advanced by its variational equation `d(∇X)/dt = ∇v(X)·∇X`.
//!
//! The displacement `X − y` is stored instead of the absolute position so
//! periodicity is exact. The Lipschitz budget `∫‖∇_y v̄‖_∞ dτ` accumulates by
//! midpoint quadrature; past 1/2 the Neumann-series inverse is no longer
//! certified and the state is flagged rather than refused.

use crate::invert::invert_jacobian;
use crate::velocity::PointVelocity;
use nssl_spectral::{Grid, PhysicalField, TensorField};
use rayon::prelude::*;

pub const CERTIFIED_BUDGET: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct FlowMapState {
    pub t: f64,
    /// Displacement `X(t,y) − y`, one component per grid dimension.
    pub displacement: PhysicalField,
    /// `∇_y X`, entry `(i, a) = ∂X_i/∂y_a`.
    pub grad_x: TensorField,
    /// Accumulated `∫₀ᵗ ‖∇_y v̄‖_∞ dτ` (pointwise Frobenius, max over labels).
    pub lip_budget: f64,
    /// False once the budget exceeds 1/2.
    pub certified: bool,
}

impl FlowMapState {
    pub fn identity(labels: &Grid) -> Self {
        FlowMapState {
            t: 0.0,
            displacement: PhysicalField::zeros(labels, labels.ndim()),
            grad_x: TensorField::identity(labels),
            lip_budget: 0.0,
            certified: true,
        }
    }

    /// Absolute positions `X = y + D` (not wrapped).
    pub fn positions(&self) -> Vec<[f64; 3]> {
        let grid = &self.displacement.grid;
        let ndim = grid.ndim();
        let mut out = vec![[0.0f64; 3]; grid.len()];
        let mut idx = [0usize; 3];
        for (flat, slot) in out.iter_mut().enumerate() {
            grid.unravel(flat, &mut idx[..ndim]);
            for a in 0..ndim {
                slot[a] = grid.coordinate(a, idx[a]) + self.displacement.data[a][flat];
            }
        }
        out
    }

    /// Inverse Jacobian `A = (∇_y X)^{-1}` via the exact cofactor path.
    pub fn inverse_jacobian(&self) -> TensorField {
        self.grad_x.inverse_exact()
    }

    /// Inverse Jacobian via the truncated Neumann series (certified region).
    pub fn inverse_jacobian_series(&self, terms: usize) -> crate::Result<TensorField> {
        invert_jacobian(&self.grad_x, terms)
    }

    pub fn determinant(&self) -> Vec<f64> {
        self.grad_x.determinant()
    }

    pub fn max_det_deviation(&self) -> f64 {
        self.determinant()
            .iter()
            .fold(0.0f64, |acc, &d| acc.max((d - 1.0).abs()))
    }
}

/// RK4 integrator advancing positions and Jacobians over the label grid.
pub struct FlowIntegrator<'a, V: PointVelocity> {
    pub state: FlowMapState,
    velocity: &'a V,
}

fn matmul3(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

impl<'a, V: PointVelocity> FlowIntegrator<'a, V> {
    pub fn new(labels: &Grid, velocity: &'a V) -> Self {
        FlowIntegrator {
            state: FlowMapState::identity(labels),
            velocity,
        }
    }

    /// One RK4 step for every label point; the Lipschitz budget advances by
    /// the midpoint value of `max_y ‖∇v(X)·∇X‖_F`.
    pub fn step(&mut self, dt: f64) {
        let grid = self.state.displacement.grid.clone();
        let ndim = grid.ndim();
        let n = grid.len();
        let t = self.state.t;
        let velocity = self.velocity;

        // Gather per-label state.
        let positions = self.state.positions();
        let mut jacobians: Vec<[[f64; 3]; 3]> = (0..n).map(|i| self.state.grad_x.at(i)).collect();
        let mut new_positions = positions.clone();

        let budget_samples: Vec<f64> = new_positions
            .par_iter_mut()
            .zip(jacobians.par_iter_mut())
            .map(|(pos, m)| {
                let x0 = *pos;
                let m0 = *m;

                let eval = |tt: f64, x: &[f64; 3], mm: &[[f64; 3]; 3]| {
                    let v = velocity.velocity(tt, x);
                    let j = velocity.jacobian(tt, x);
                    (v, matmul3(&j, mm))
                };

                let add = |x: &[f64; 3], k: &[f64; 3], s: f64| {
                    [x[0] + s * k[0], x[1] + s * k[1], x[2] + s * k[2]]
                };
                let madd = |m: &[[f64; 3]; 3], k: &[[f64; 3]; 3], s: f64| {
                    let mut out = *m;
                    for i in 0..3 {
                        for j in 0..3 {
                            out[i][j] += s * k[i][j];
                        }
                    }
                    out
                };

                let (k1, l1) = eval(t, &x0, &m0);
                let (k2, l2) = eval(t + 0.5 * dt, &add(&x0, &k1, 0.5 * dt), &madd(&m0, &l1, 0.5 * dt));
                let (k3, l3) = eval(t + 0.5 * dt, &add(&x0, &k2, 0.5 * dt), &madd(&m0, &l2, 0.5 * dt));
                let (k4, l4) = eval(t + dt, &add(&x0, &k3, dt), &madd(&m0, &l3, dt));

                for a in 0..3 {
                    pos[a] = x0[a] + dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
                }
                let mut mnew = m0;
                for i in 0..3 {
                    for j in 0..3 {
                        mnew[i][j] += dt / 6.0
                            * (l1[i][j] + 2.0 * l2[i][j] + 2.0 * l3[i][j] + l4[i][j]);
                    }
                }
                *m = mnew;

                // Midpoint sample of ‖∇_y v̄‖_F = ‖∇v(X)·∇X‖_F.
                let mut frob = 0.0;
                for row in &l2 {
                    for &e in row {
                        frob += e * e;
                    }
                }
                frob.sqrt()
            })
            .collect();

        // Scatter back.
        let mut idx = [0usize; 3];
        for flat in 0..n {
            grid.unravel(flat, &mut idx[..ndim]);
            for a in 0..ndim {
                let y = grid.coordinate(a, idx[a]);
                self.state.displacement.data[a][flat] = new_positions[flat][a] - y;
            }
            self.state.grad_x.set_at(flat, &jacobians[flat]);
        }
        let peak = budget_samples.iter().fold(0.0f64, |a, &b| a.max(b));
        self.state.lip_budget += dt * peak;
        if self.state.lip_budget > CERTIFIED_BUDGET {
            self.state.certified = false;
        }
        self.state.t += dt;
    }
}
