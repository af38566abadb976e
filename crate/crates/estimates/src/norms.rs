//! Lebesgue and Sobolev norms by uniform-grid quadrature; derivatives are
//! spectral. Vector fields are measured through their pointwise Euclidean
//! magnitude.

use crate::error::{EstimatesError, Result};
use nssl_spectral::{deriv, PhysicalField, SpectralField};

/// `‖f‖_{Lp}` for `p ∈ [1, ∞]` (pass `f64::INFINITY` for the sup norm).
pub fn lp_norm_physical(field: &PhysicalField, p: f64) -> f64 {
    assert!(p >= 1.0, "Lebesgue exponent must be at least 1");
    let n = field.grid.len();
    if p.is_infinite() {
        return field.max_magnitude();
    }
    let w = field.grid.cell_volume();
    let mut sum = 0.0;
    for i in 0..n {
        let mut mag2 = 0.0;
        for comp in &field.data {
            mag2 += comp[i] * comp[i];
        }
        sum += mag2.powf(0.5 * p);
    }
    (w * sum).powf(1.0 / p)
}

pub fn lp_norm(field: &SpectralField, p: f64) -> f64 {
    if p == 2.0 {
        // Parseval path: exact and cheaper.
        return field.l2_norm();
    }
    lp_norm_physical(&field.to_physical(), p)
}

/// All first partials of every component, stored `∂r f_c ↦ data[r·ncomp + c]`.
pub fn gradient_components(field: &SpectralField) -> SpectralField {
    let ndim = field.grid.ndim();
    let mut parts = Vec::with_capacity(ndim * field.ncomp());
    for axis in 0..ndim {
        let d = deriv(field, axis);
        for c in 0..d.ncomp() {
            parts.push(d.component(c));
        }
    }
    SpectralField::from_components(parts)
}

/// All second partials `∂i ∂j f_c` (full tensor, both orders retained).
pub fn hessian_components(field: &SpectralField) -> SpectralField {
    let ndim = field.grid.ndim();
    let mut parts = Vec::new();
    for i in 0..ndim {
        let di = deriv(field, i);
        for j in 0..ndim {
            let dij = deriv(&di, j);
            for c in 0..dij.ncomp() {
                parts.push(dij.component(c));
            }
        }
    }
    SpectralField::from_components(parts)
}

/// `‖∇f‖_{Lp}` with the pointwise Frobenius magnitude.
pub fn grad_lp_norm(field: &SpectralField, p: f64) -> f64 {
    lp_norm_physical(&gradient_components(field).to_physical(), p)
}

/// `‖∇²f‖_{Lp}` with the pointwise Frobenius magnitude over all `∂i∂j f_c`.
pub fn hessian_lp_norm(field: &SpectralField, p: f64) -> f64 {
    lp_norm_physical(&hessian_components(field).to_physical(), p)
}

/// Inhomogeneous Sobolev norm `‖f‖_{Lp} + Σ_{m'=1..m} ‖∇^{m'} f‖_{Lp}`.
pub fn sobolev_norm(field: &SpectralField, order: usize, p: f64) -> Result<f64> {
    if order > 2 {
        return Err(EstimatesError::ConfigRange(format!(
            "sobolev order {order} unsupported (max 2)"
        )));
    }
    let mut total = lp_norm(field, p);
    if order >= 1 {
        total += grad_lp_norm(field, p);
    }
    if order >= 2 {
        total += hessian_lp_norm(field, p);
    }
    Ok(total)
}

/// Intersection norm `‖f‖_{L2 ∩ L∞} = max(‖f‖_{L2}, ‖f‖_{L∞})`.
pub fn l2_linf_norm(field: &SpectralField) -> f64 {
    let phys = field.to_physical();
    lp_norm_physical(&phys, 2.0).max(phys.max_magnitude())
}
