//! Momentum forcing of the perturbation system, assembled in both groupings.
//!
//! The equation for the velocity deviation reads
//! `w_t + v·∇w − Δw + ∇q = F` with
//! `F = −h·(v²ᵈ)_t − h·w_t − h(v·∇w) − ρ(w_h·∇_h v²ᵈ) − h(v²ᵈ_h·∇_h v²ᵈ)`,
//! `ρ = 1 + h`, `v = v²ᵈ + w`. Moving the advection to the right gives the
//! Stokes form `w_t − Δw + ∇q = F − v·∇w = −Σᵢ Fᵢ` with the six parts
//! `F₁ = ρ(v²ᵈ·∇w)`, `F₂ = ρ(w·∇w)`, `F₃ = h(v²ᵈ)_t`, `F₄ = h·w_t`,
//! `F₅ = ρ(w_h·∇_h v²ᵈ)`, `F₆ = h(v²ᵈ_h·∇_h v²ᵈ)`. Only `F₄` depends on the
//! implicit `w_t`, so the assembler precomputes everything else once per
//! step and the inner fixed point pays three transforms per sweep.

use nssl_spectral::{deriv, PhysicalField, SpectralField};

/// Physical-space ingredients of one assembly time.
pub struct ForcingAssembler {
    pub h: PhysicalField,
    pub rho: PhysicalField,
    pub w: PhysicalField,
    /// `∂_j w_c` at index `j·3 + c`
    pub grad_w: PhysicalField,
    /// Broadcast background velocity and its time derivative.
    pub v2d: PhysicalField,
    pub v2d_t: PhysicalField,
    /// `∂_j v²ᵈ_c` for j ∈ {0,1} at index `j·3 + c` (broadcast).
    pub grad_v2d: PhysicalField,
    /// `−(F₁+F₂+F₃+F₅+F₆)`: the Stokes right side minus the `−F₄` term.
    pub base_stokes: PhysicalField,
}

/// The six named parts plus both groupings at one time.
pub struct ForcingBreakdown {
    pub parts: [PhysicalField; 6],
    /// The perturbation-equation forcing `F` (physical).
    pub f_pert: PhysicalField,
    /// The Stokes right side `F − v·∇w` (physical).
    pub f_stokes: PhysicalField,
}

impl ForcingAssembler {
    pub fn new(
        h_spec: &SpectralField,
        w_spec: &SpectralField,
        v2d_2d: &SpectralField,
        v2d_t_2d: &SpectralField,
        grid3: &nssl_spectral::Grid,
    ) -> Self {
        let h = h_spec.to_physical();
        let n = grid3.len();
        let mut rho = PhysicalField::zeros(grid3, 1);
        for (slot, &hv) in rho.data[0].iter_mut().zip(&h.data[0]) {
            *slot = 1.0 + hv;
        }
        let w = w_spec.to_physical();
        let mut grad_parts = Vec::with_capacity(9);
        for j in 0..3 {
            let d = deriv(w_spec, j);
            for c in 0..3 {
                grad_parts.push(d.component(c));
            }
        }
        let grad_w = SpectralField::from_components(grad_parts).to_physical();

        let v2d = crate::background::broadcast_physical(&v2d_2d.to_physical(), grid3);
        let v2d_t = crate::background::broadcast_physical(&v2d_t_2d.to_physical(), grid3);
        let mut gv_parts = Vec::with_capacity(6);
        for j in 0..2 {
            let d = deriv(v2d_2d, j);
            for c in 0..3 {
                gv_parts.push(d.component(c));
            }
        }
        let grad_v2d = crate::background::broadcast_physical(
            &SpectralField::from_components(gv_parts).to_physical(),
            grid3,
        );

        // base = −(F₁+F₂+F₃+F₅+F₆)
        let mut base_stokes = PhysicalField::zeros(grid3, 3);
        for c in 0..3 {
            let dst = &mut base_stokes.data[c];
            for i in 0..n {
                let rho_i = rho.data[0][i];
                let h_i = h.data[0][i];
                // (v²ᵈ·∇w)_c over all three axes (v²ᵈ₃ advects in x₃ too).
                let mut v2d_grad_w = 0.0;
                let mut w_grad_w = 0.0;
                for j in 0..3 {
                    let g = grad_w.data[j * 3 + c][i];
                    v2d_grad_w += v2d.data[j][i] * g;
                    w_grad_w += w.data[j][i] * g;
                }
                // (w_h·∇_h v²ᵈ)_c and (v²ᵈ_h·∇_h v²ᵈ)_c.
                let mut wh_grad_v = 0.0;
                let mut vh_grad_v = 0.0;
                for j in 0..2 {
                    let g = grad_v2d.data[j * 3 + c][i];
                    wh_grad_v += w.data[j][i] * g;
                    vh_grad_v += v2d.data[j][i] * g;
                }
                let f1 = rho_i * v2d_grad_w;
                let f2 = rho_i * w_grad_w;
                let f3 = h_i * v2d_t.data[c][i];
                let f5 = rho_i * wh_grad_v;
                let f6 = h_i * vh_grad_v;
                dst[i] = -(f1 + f2 + f3 + f5 + f6);
            }
        }
        ForcingAssembler {
            h,
            rho,
            w,
            grad_w,
            v2d,
            v2d_t,
            grad_v2d,
            base_stokes,
        }
    }

    /// Stokes right side for a given `w_t` iterate: `base − h·w_t`,
    /// dealiased in spectral space.
    pub fn stokes_rhs(&self, w_t_phys: &PhysicalField) -> SpectralField {
        let grid = &self.base_stokes.grid;
        let mut g = PhysicalField::zeros(grid, 3);
        for c in 0..3 {
            for (slot, ((&b, &h), &wt)) in g.data[c].iter_mut().zip(
                self.base_stokes.data[c]
                    .iter()
                    .zip(&self.h.data[0])
                    .zip(&w_t_phys.data[c]),
            ) {
                *slot = b - h * wt;
            }
        }
        let mut spec = g.to_spectral();
        spec.dealias();
        spec
    }

    /// Full breakdown for a converged `w_t`.
    pub fn breakdown(&self, w_t_phys: &PhysicalField) -> ForcingBreakdown {
        let grid = self.base_stokes.grid.clone();
        let n = grid.len();
        let mut parts: Vec<PhysicalField> = (0..6).map(|_| PhysicalField::zeros(&grid, 3)).collect();
        let mut f_pert = PhysicalField::zeros(&grid, 3);
        let mut f_stokes = PhysicalField::zeros(&grid, 3);
        for c in 0..3 {
            for i in 0..n {
                let rho_i = self.rho.data[0][i];
                let h_i = self.h.data[0][i];
                let mut v2d_grad_w = 0.0;
                let mut w_grad_w = 0.0;
                for j in 0..3 {
                    let g = self.grad_w.data[j * 3 + c][i];
                    v2d_grad_w += self.v2d.data[j][i] * g;
                    w_grad_w += self.w.data[j][i] * g;
                }
                let mut wh_grad_v = 0.0;
                let mut vh_grad_v = 0.0;
                for j in 0..2 {
                    let g = self.grad_v2d.data[j * 3 + c][i];
                    wh_grad_v += self.w.data[j][i] * g;
                    vh_grad_v += self.v2d.data[j][i] * g;
                }
                let f1 = rho_i * v2d_grad_w;
                let f2 = rho_i * w_grad_w;
                let f3 = h_i * self.v2d_t.data[c][i];
                let f4 = h_i * w_t_phys.data[c][i];
                let f5 = rho_i * wh_grad_v;
                let f6 = h_i * vh_grad_v;
                parts[0].data[c][i] = f1;
                parts[1].data[c][i] = f2;
                parts[2].data[c][i] = f3;
                parts[3].data[c][i] = f4;
                parts[4].data[c][i] = f5;
                parts[5].data[c][i] = f6;
                // F = −F₃ − F₄ − h(v·∇w) − F₅·(ρ/ρ)… assembled directly:
                let h_v_grad_w = h_i * (v2d_grad_w + w_grad_w);
                f_pert.data[c][i] = -(f3 + f4 + h_v_grad_w + f5 + f6);
                // F − v·∇w = −ΣFᵢ
                f_stokes.data[c][i] = -(f1 + f2 + f3 + f4 + f5 + f6);
            }
        }
        let parts: [PhysicalField; 6] = parts.try_into().ok().unwrap();
        ForcingBreakdown {
            parts,
            f_pert,
            f_stokes,
        }
    }
}

impl ForcingBreakdown {
    /// Worst pointwise gap of the regrouping identity
    /// `(F − v·∇w) + ΣFᵢ = 0`.
    pub fn grouping_gap(&self, v_grad_w: &PhysicalField) -> f64 {
        let mut worst = 0.0f64;
        for c in 0..3 {
            for i in 0..self.f_pert.grid.len() {
                let lhs = self.f_pert.data[c][i] - v_grad_w.data[c][i];
                let mut sum = 0.0;
                for p in &self.parts {
                    sum += p.data[c][i];
                }
                worst = worst.max((lhs + sum).abs());
            }
        }
        worst
    }
}
