//! Eulerian ↔ Lagrangian consistency checks.
//!
//! In flow coordinates the transported density freezes, `h(t, X(t,y)) =
//! h₀(y)`, and the momentum equation becomes
//! `w̄_t − div(A Aᵀ ∇_y w̄) + Aᵀ ∇_y q̄ = F̄` with `A = (∇_y X)^{-1}` and the
//! constraint `div(A w̄) = Aᵀ : ∇_y w̄ = 0` (valid since `det A ≡ 1` for
//! divergence-free velocities). This module pulls an Eulerian trajectory back
//! along a computed flow map and measures those identities.

use crate::error::{LagrangianError, Result};
use crate::flow::FlowMapState;
use nssl_estimates::gradient_components;
use nssl_spectral::{deriv, PhysicalField, SpectralField, TensorField};

/// One recorded time of an Eulerian perturbation run, in physical space.
#[derive(Debug, Clone)]
pub struct EulerianSnapshot {
    pub t: f64,
    pub h: PhysicalField,
    pub w: PhysicalField,
    pub q: PhysicalField,
    /// Momentum forcing `F` of the perturbation equation at this time.
    pub f: PhysicalField,
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    /// `(t, ‖h(t, X(t,·)) − h₀‖_{L2})`
    pub density_freeze_l2: Vec<(f64, f64)>,
    /// `(t, L2 residual of the flow-coordinate momentum equation, scale)`
    pub momentum_residual_l2: Vec<(f64, f64, f64)>,
    /// `(t, ‖Aᵀ:∇w̄‖_{L2}, ‖∇w̄‖_{L2})` — the twisted divergence of the
    /// pulled-back field and its natural scale.
    pub divergence_l2: Vec<(f64, f64, f64)>,
    /// False when the Lipschitz budget left the certified window.
    pub certified: bool,
}

/// Sample every component of an Eulerian field at the flow-map positions.
fn pull_back(field: &PhysicalField, positions: &[[f64; 3]], labels: &nssl_spectral::Grid) -> PhysicalField {
    let ncomp = field.ncomp();
    let mut out = PhysicalField::zeros(labels, ncomp);
    for c in 0..ncomp {
        for (flat, pos) in positions.iter().enumerate() {
            out.data[c][flat] = field.sample_cubic(c, pos);
        }
    }
    out
}

/// `div(A Aᵀ ∇w̄)` for each component of `w̄`, spectral derivatives with
/// pointwise coefficient products.
fn twisted_diffusion(a: &TensorField, w_bar: &SpectralField) -> SpectralField {
    let d = a.ndim;
    let b = a.matmul(&a.transpose());
    let grad = gradient_components(w_bar); // ∂_r w_c at r·ncomp + c
    let grad_phys = grad.to_physical();
    let ncomp = w_bar.ncomp();
    let mut parts = Vec::with_capacity(ncomp);
    for m in 0..ncomp {
        // Flux vector F_r = Σ_c B[r][c] ∂_c w_m, then Σ_r ∂_r F_r.
        let mut div_term: Option<SpectralField> = None;
        for r in 0..d {
            let mut flux = PhysicalField::zeros(&a.grid, 1);
            for c in 0..d {
                let bcomp = b.entry(r, c);
                let g = &grad_phys.data[c * ncomp + m];
                for (slot, (&bb, &gg)) in flux.data[0].iter_mut().zip(bcomp.iter().zip(g)) {
                    *slot += bb * gg;
                }
            }
            let mut flux_spec = flux.to_spectral();
            flux_spec.dealias();
            let dflux = deriv(&flux_spec, r);
            match &mut div_term {
                Some(acc) => acc.axpy(1.0, &dflux),
                None => div_term = Some(dflux),
            }
        }
        parts.push(div_term.unwrap());
    }
    SpectralField::from_components(parts)
}

/// `Aᵀ ∇q̄` as a physical vector field.
fn twisted_pressure_gradient(a: &TensorField, q_bar: &SpectralField) -> PhysicalField {
    let d = a.ndim;
    let grad_q = gradient_components(q_bar).to_physical(); // ∂_r q at r
    let mut out = PhysicalField::zeros(&a.grid, d);
    for i in 0..d {
        for j in 0..d {
            let acomp = a.entry(j, i); // (Aᵀ)_{ij} = A_{ji}
            let g = &grad_q.data[j];
            for (slot, (&aa, &gg)) in out.data[i].iter_mut().zip(acomp.iter().zip(g)) {
                *slot += aa * gg;
            }
        }
    }
    out
}

/// `Aᵀ : ∇z` — the twisted divergence under `det A ≡ 1`.
pub fn twisted_divergence(a: &TensorField, z_bar: &SpectralField) -> PhysicalField {
    let grad = gradient_components(z_bar).to_physical();
    a.transpose_contract(&grad)
}

/// Run the consistency checks over matched Eulerian and flow trajectories.
/// `w̄_t` uses centered time differences, so the momentum residual is
/// reported at interior records only.
pub fn euler_lagrange_consistency(
    eulerian: &[EulerianSnapshot],
    flow: &[FlowMapState],
) -> Result<ConsistencyReport> {
    assert!(eulerian.len() >= 3, "need at least three records");
    if eulerian.len() != flow.len() {
        return Err(LagrangianError::TimeGridMismatch { index: 0 });
    }
    for (i, (e, f)) in eulerian.iter().zip(flow).enumerate() {
        if (e.t - f.t).abs() > 1e-9 {
            return Err(LagrangianError::TimeGridMismatch { index: i });
        }
    }
    let labels = flow[0].displacement.grid.clone();
    let h0 = &eulerian[0].h;
    let certified = flow.iter().all(|f| f.certified);

    // Pull back the velocity at every record once (needed for the time
    // derivative stencil).
    let positions: Vec<Vec<[f64; 3]>> = flow.iter().map(|f| f.positions()).collect();
    let w_bars: Vec<PhysicalField> = eulerian
        .iter()
        .zip(&positions)
        .map(|(e, pos)| pull_back(&e.w, pos, &labels))
        .collect();

    let mut density_freeze_l2 = Vec::new();
    let mut momentum_residual_l2 = Vec::new();
    let mut divergence_l2 = Vec::new();

    let w_cell = labels.cell_volume();
    let l2_of = |f: &PhysicalField| -> f64 {
        let mut sum = 0.0;
        for i in 0..f.grid.len() {
            let mut m2 = 0.0;
            for comp in &f.data {
                m2 += comp[i] * comp[i];
            }
            sum += m2;
        }
        (w_cell * sum).sqrt()
    };

    for (i, (e, pos)) in eulerian.iter().zip(&positions).enumerate() {
        // (a) frozen density
        let h_pulled = pull_back(&e.h, pos, &labels);
        let mut diff = h_pulled.clone();
        for (d, h) in diff.data[0].iter_mut().zip(&h0.data[0]) {
            *d -= h;
        }
        density_freeze_l2.push((e.t, l2_of(&diff)));

        let a = flow[i].inverse_jacobian();

        // (c) twisted divergence of the pulled-back velocity
        let w_bar_spec = w_bars[i].to_spectral();
        let tdiv = twisted_divergence(&a, &w_bar_spec);
        let grad_scale = w_bar_spec.h1_seminorm();
        divergence_l2.push((e.t, l2_of(&tdiv), grad_scale));

        // (b) momentum residual at interior records
        if i == 0 || i + 1 == eulerian.len() {
            continue;
        }
        let dt_fwd = eulerian[i + 1].t - e.t;
        let dt_bwd = e.t - eulerian[i - 1].t;
        let mut w_t = PhysicalField::zeros(&labels, w_bars[i].ncomp());
        for c in 0..w_t.ncomp() {
            for flat in 0..labels.len() {
                w_t.data[c][flat] = (w_bars[i + 1].data[c][flat] - w_bars[i - 1].data[c][flat])
                    / (dt_fwd + dt_bwd);
            }
        }
        let q_bar = pull_back(&e.q, pos, &labels).to_spectral();
        let f_bar = pull_back(&e.f, pos, &labels);
        let diffusion = twisted_diffusion(&a, &w_bar_spec).to_physical();
        let pressure = twisted_pressure_gradient(&a, &q_bar);
        let mut residual = w_t.clone();
        for c in 0..residual.ncomp() {
            for flat in 0..labels.len() {
                residual.data[c][flat] +=
                    -diffusion.data[c][flat] + pressure.data[c][flat] - f_bar.data[c][flat];
            }
        }
        let scale = l2_of(&f_bar) + l2_of(&w_t) + l2_of(&diffusion);
        momentum_residual_l2.push((e.t, l2_of(&residual), scale));
    }

    Ok(ConsistencyReport {
        density_freeze_l2,
        momentum_residual_l2,
        divergence_l2,
        certified,
    })
}
