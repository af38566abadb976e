//! Picard approximation mode: level `n+1` solves the linearized system with
//! every coefficient frozen at level `n`,
//!
//! `h^{n+1}_t + vⁿ·∇h^{n+1} = 0`,
//! `w^{n+1}_t + vⁿ·∇w^{n+1} − Δw^{n+1} + ∇p^{n+1}
//!    = −hⁿ(w^{n+1}_t + v^{n−1}·∇w^{n+1}) − (1+hⁿ)(w^{n+1}_h·∇_h v²ᵈ)
//!      − hⁿ(v²ᵈ)_t − hⁿ(v²ᵈ_h·∇_h v²ᵈ)`,
//!
//! with the seeds `v⁻¹ ≡ 0`, `w⁰ ≡ w₀`, `h⁰ ≡ h₀`, `v⁰ ≡ v₀ = v²ᵈ₀ + w₀`
//! (frozen in time). Successive levels are compared through
//! `Iₙ = sup_t ‖δhⁿ‖² + sup_t ‖δwⁿ‖² + ∫‖∇δwⁿ‖²`.

use crate::background::{broadcast_physical, BackgroundStep};
use crate::error::{Ins3dError, Result};
use crate::transport::density_advect_sl;
use nssl_spectral::{deriv, laplacian, leray_project, PhysicalField, SpectralField};

/// One level's stored trajectory at every step time.
#[derive(Clone)]
pub struct PicardTrajectory {
    pub h: Vec<SpectralField>,
    pub w: Vec<SpectralField>,
}

pub struct PicardParams {
    pub dt: f64,
    pub nsteps: usize,
    pub n_max: usize,
    pub tol: f64,
    pub inner_tol: f64,
    pub inner_max: usize,
    pub cfl_limit: f64,
}

impl Default for PicardParams {
    fn default() -> Self {
        PicardParams {
            dt: 5e-3,
            nsteps: 40,
            n_max: 8,
            tol: 1e-12,
            inner_tol: 1e-11,
            inner_max: 60,
            cfl_limit: 1.0,
        }
    }
}

pub struct PicardRun {
    /// Contraction quantities `I₁, I₂, …` (level n against level n−1).
    pub i_history: Vec<f64>,
    pub final_level: PicardTrajectory,
    pub levels_run: usize,
    pub converged: bool,
}

/// Velocity of a stored level at step `i`, broadcast/assembled in physical
/// space. `level = None` encodes the identically-zero seed `v⁻¹`.
enum LevelVelocity<'a> {
    Zero,
    /// `v⁰ ≡ v₀` frozen in time.
    Frozen(&'a PhysicalField),
    Traj(&'a PicardTrajectory),
}

impl LevelVelocity<'_> {
    fn at(
        &self,
        i: usize,
        background: &[BackgroundStep],
        grid: &nssl_spectral::Grid,
    ) -> PhysicalField {
        match self {
            LevelVelocity::Zero => PhysicalField::zeros(grid, 3),
            LevelVelocity::Frozen(v0) => (*v0).clone(),
            LevelVelocity::Traj(traj) => {
                let mut v = broadcast_physical(&background[i].v.to_physical(), grid);
                let w_phys = traj.w[i].to_physical();
                for c in 0..3 {
                    for (slot, &wv) in v.data[c].iter_mut().zip(&w_phys.data[c]) {
                        *slot += wv;
                    }
                }
                v
            }
        }
    }
}

/// Solve one level given the previous two levels' velocities and the
/// previous level's density.
#[allow(clippy::too_many_arguments)]
fn solve_level(
    h0: &SpectralField,
    w0: &SpectralField,
    background: &[BackgroundStep],
    h_prev: &PicardTrajectory,
    v_n: &LevelVelocity<'_>,
    v_nm1: &LevelVelocity<'_>,
    params: &PicardParams,
) -> Result<PicardTrajectory> {
    let grid = h0.grid.clone();
    let n_grid = grid.len();
    let dt = params.dt;
    let mut h = h0.clone();
    let mut w = leray_project(w0);
    let mut w_t = SpectralField::zeros(&grid, 3);
    let mut history: Vec<SpectralField> = Vec::new();
    let mut out = PicardTrajectory {
        h: Vec::with_capacity(params.nsteps + 1),
        w: Vec::with_capacity(params.nsteps + 1),
    };
    let decay: Vec<f64> = grid.k_sq_table().iter().map(|&k| (-k * dt).exp()).collect();

    for i in 0..=params.nsteps {
        out.h.push(h.clone());
        out.w.push(w.clone());
        if i == params.nsteps {
            break;
        }

        // Physical coefficient fields at t_i.
        let h_n_phys = h_prev.h[i].to_physical();
        let vn_phys = v_n.at(i, background, &grid);
        let vnm1_phys = v_nm1.at(i, background, &grid);
        let v2d_phys = broadcast_physical(&background[i].v.to_physical(), &grid);
        let v2dt_phys = broadcast_physical(&background[i].v_t.to_physical(), &grid);
        let mut gv_parts = Vec::with_capacity(6);
        for j in 0..2 {
            let d = deriv(&background[i].v, j);
            for c in 0..3 {
                gv_parts.push(d.component(c));
            }
        }
        let grad_v2d = broadcast_physical(
            &SpectralField::from_components(gv_parts).to_physical(),
            &grid,
        );

        // ∇w of the current level (explicit at t_i).
        let mut gw_parts = Vec::with_capacity(9);
        for j in 0..3 {
            let d = deriv(&w, j);
            for c in 0..3 {
                gw_parts.push(d.component(c));
            }
        }
        let grad_w = SpectralField::from_components(gw_parts).to_physical();
        let w_phys = w.to_physical();

        // base = −vⁿ·∇w − hⁿ(v^{n−1}·∇w) − (1+hⁿ)(w_h·∇_h v²ᵈ)
        //        − hⁿ(v²ᵈ)_t − hⁿ(v²ᵈ_h·∇_h v²ᵈ)
        let mut base = PhysicalField::zeros(&grid, 3);
        for c in 0..3 {
            let dst = &mut base.data[c];
            for p in 0..n_grid {
                let h_i = h_n_phys.data[0][p];
                let rho_i = 1.0 + h_i;
                let mut vn_gw = 0.0;
                let mut vm_gw = 0.0;
                for j in 0..3 {
                    let g = grad_w.data[j * 3 + c][p];
                    vn_gw += vn_phys.data[j][p] * g;
                    vm_gw += vnm1_phys.data[j][p] * g;
                }
                let mut wh_gv = 0.0;
                let mut vh_gv = 0.0;
                for j in 0..2 {
                    let g = grad_v2d.data[j * 3 + c][p];
                    wh_gv += w_phys.data[j][p] * g;
                    vh_gv += v2d_phys.data[j][p] * g;
                }
                dst[p] = -vn_gw - h_i * vm_gw - rho_i * wh_gv
                    - h_i * v2dt_phys.data[c][p]
                    - h_i * vh_gv;
            }
        }

        // Inner fixed point on w_t (the −hⁿ·w_t term is implicit).
        let lap_w = laplacian(&w);
        let scale = w.l2_norm().max(1.0);
        let mut pg_final = None;
        for _sweep in 0..params.inner_max {
            let wt_phys = w_t.to_physical();
            let mut g = PhysicalField::zeros(&grid, 3);
            for c in 0..3 {
                for (slot, ((&b, &hh), &wt)) in g.data[c].iter_mut().zip(
                    base.data[c]
                        .iter()
                        .zip(&h_n_phys.data[0])
                        .zip(&wt_phys.data[c]),
                ) {
                    *slot = b - hh * wt;
                }
            }
            let mut g_spec = g.to_spectral();
            g_spec.dealias();
            let pg = leray_project(&g_spec);
            let mut next = lap_w.clone();
            next.axpy(1.0, &pg);
            let update = next.l2_distance(&w_t);
            w_t = next;
            if update <= params.inner_tol * scale {
                pg_final = Some(pg);
                break;
            }
        }
        let pg = pg_final.ok_or(Ins3dError::InnerNoConvergence {
            sweeps: params.inner_max,
            h_linf: h_n_phys.max_abs(),
            last: f64::NAN,
        })?;

        // AB2 with exact diffusion factor.
        let weights: &[f64] = if history.is_empty() {
            &[1.0]
        } else {
            &[1.5, -0.5]
        };
        for c in 0..3 {
            let comp = &mut w.coeffs[c];
            for (flat, value) in comp.iter_mut().enumerate() {
                let e = decay[flat];
                let mut acc = *value + dt * weights[0] * pg.coeffs[c][flat];
                if weights.len() > 1 {
                    acc += dt * weights[1] * e * history[history.len() - 1].coeffs[c][flat];
                }
                *value = e * acc;
            }
        }
        w = leray_project(&w);
        history.push(pg);
        if history.len() > 1 {
            history.remove(0);
        }

        // Transport h^{n+1} by vⁿ.
        let h_phys = h.to_physical();
        h = density_advect_sl(&h_phys, &vn_phys, dt, params.cfl_limit, false)?.to_spectral();

        if w.has_non_finite() || h.has_non_finite() {
            return Err(Ins3dError::Diverged { step: i + 1 });
        }
    }
    Ok(out)
}

/// Contraction quantity between consecutive levels.
pub fn contraction_quantity(cur: &PicardTrajectory, prev: &PicardTrajectory, dt: f64) -> f64 {
    let mut sup_dh = 0.0f64;
    let mut sup_dw = 0.0f64;
    let mut grad_int = 0.0f64;
    let mut prev_grad_sq: Option<f64> = None;
    for i in 0..cur.h.len() {
        let dh = cur.h[i].l2_distance(&prev.h[i]);
        let dw = cur.w[i].l2_distance(&prev.w[i]);
        sup_dh = sup_dh.max(dh * dh);
        sup_dw = sup_dw.max(dw * dw);
        let mut diff = cur.w[i].clone();
        diff.axpy(-1.0, &prev.w[i]);
        let g = diff.h1_seminorm().powi(2);
        if let Some(pg) = prev_grad_sq {
            grad_int += 0.5 * dt * (pg + g);
        }
        prev_grad_sq = Some(g);
    }
    sup_dh + sup_dw + grad_int
}

/// Build the Picard iterates. `background` must hold `nsteps + 1` recorded
/// levels at the run's `dt`.
pub fn picard_solve(
    h0: &SpectralField,
    w0: &SpectralField,
    background: &[BackgroundStep],
    params: &PicardParams,
) -> Result<PicardRun> {
    assert!(background.len() > params.nsteps);
    let grid = h0.grid.clone();
    let h_linf = h0.to_physical().max_abs();
    if h_linf > 0.5 {
        return Err(Ins3dError::DensityTooLarge { linf: h_linf });
    }
    let w0p = leray_project(w0);

    // Level 0: constant-in-time seeds.
    let nrec = params.nsteps + 1;
    let level0 = PicardTrajectory {
        h: vec![h0.clone(); nrec],
        w: vec![w0p.clone(); nrec],
    };
    // v⁰ ≡ v₀ = v²ᵈ₀ + w₀ frozen in time.
    let v0_frozen = {
        let mut v = broadcast_physical(&background[0].v.to_physical(), &grid);
        let w_phys = w0p.to_physical();
        for c in 0..3 {
            for (slot, &wv) in v.data[c].iter_mut().zip(&w_phys.data[c]) {
                *slot += wv;
            }
        }
        v
    };

    let mut i_history: Vec<f64> = Vec::new();
    let mut prev2: Option<PicardTrajectory> = None; // level n−1
    let mut prev = level0; // level n
    let mut converged = false;
    let mut levels_run = 0;

    for n in 0..params.n_max {
        let v_n: LevelVelocity = if n == 0 {
            LevelVelocity::Frozen(&v0_frozen)
        } else {
            LevelVelocity::Traj(&prev)
        };
        let v_nm1: LevelVelocity = match (n, &prev2) {
            (0, _) => LevelVelocity::Zero,
            (1, _) => LevelVelocity::Frozen(&v0_frozen),
            (_, Some(p2)) => LevelVelocity::Traj(p2),
            _ => unreachable!(),
        };
        let next = solve_level(h0, &w0p, background, &prev, &v_n, &v_nm1, params)?;
        levels_run = n + 1;
        let i_n = contraction_quantity(&next, &prev, params.dt);
        i_history.push(i_n);
        prev2 = Some(std::mem::replace(&mut prev, next));
        if i_n <= params.tol {
            converged = true;
            break;
        }
        // Non-contraction diagnostic: I non-decreasing over 3 consecutive
        // levels suggests the horizon is too long for the contraction.
        let m = i_history.len();
        if m >= 3
            && i_history[m - 1] >= i_history[m - 2]
            && i_history[m - 2] >= i_history[m - 3]
            && i_history[m - 1] > params.tol
        {
            return Err(Ins3dError::PicardStalled {
                levels: i_history.clone(),
            });
        }
    }

    Ok(PicardRun {
        i_history,
        final_level: prev,
        levels_run,
        converged,
    })
}
