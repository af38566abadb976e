//! Differential and projection operators, diagonal in Fourier space.

use crate::error::{Result, SpectralError};
use crate::field::SpectralField;
use num_complex::Complex64;

/// Partial derivative along `axis` of every component.
pub fn deriv(field: &SpectralField, axis: usize) -> SpectralField {
    let grid = field.grid.clone();
    let k_vec = grid.k_vec_table();
    let mut out = field.clone();
    for comp in &mut out.coeffs {
        for (c, k) in comp.iter_mut().zip(k_vec) {
            *c = Complex64::new(0.0, k[axis]) * *c;
        }
    }
    out
}

/// Gradient of a scalar field; ncomp of the result equals the grid dimension.
pub fn gradient(field: &SpectralField) -> SpectralField {
    assert_eq!(field.ncomp(), 1, "gradient expects a scalar field");
    let parts: Vec<SpectralField> = (0..field.grid.ndim()).map(|a| deriv(field, a)).collect();
    SpectralField::from_components(parts)
}

/// Divergence. For an `ndim`-component field this is the full divergence;
/// for a 3-component field on a 2D grid only the horizontal part
/// `∂₁v₁ + ∂₂v₂` exists.
pub fn divergence(field: &SpectralField) -> SpectralField {
    let ndim = field.grid.ndim();
    let ncomp = field.ncomp();
    assert!(
        ncomp == ndim || (ndim == 2 && ncomp == 3),
        "divergence expects an ndim- or (2D, 3)-component field"
    );
    let nsum = ndim.min(ncomp);
    let mut out = deriv(&field.component(0), 0);
    for axis in 1..nsum {
        out.axpy(1.0, &deriv(&field.component(axis), axis));
    }
    out
}

/// Laplacian of every component.
pub fn laplacian(field: &SpectralField) -> SpectralField {
    let grid = field.grid.clone();
    let k_sq = grid.k_sq_table();
    let mut out = field.clone();
    for comp in &mut out.coeffs {
        for (c, &k2) in comp.iter_mut().zip(k_sq) {
            *c *= -k2;
        }
    }
    out
}

/// Leray projection onto divergence-free fields: `û ← û − k(k·û)/|k|²`.
///
/// On a 2D grid with a 3-component field, only the horizontal pair is
/// projected (the constraint is `∂₁v₁ + ∂₂v₂ = 0`) and the third component
/// passes through untouched. The mean mode is left as is.
pub fn leray_project(field: &SpectralField) -> SpectralField {
    let ndim = field.grid.ndim();
    let ncomp = field.ncomp();
    assert!(
        ncomp == ndim || (ndim == 2 && ncomp == 3),
        "leray_project expects an ndim- or (2D, 3)-component field"
    );
    let nproj = ndim.min(ncomp);
    let grid = field.grid.clone();
    let k_vec = grid.k_vec_table();
    let mut out = field.clone();
    let n = grid.len();
    // Work mode by mode across the projected components; the horizontal |k|²
    // equals the full |k|² in 2D and must be recomputed componentwise in 3D
    // only when nproj < ndim (never the case here).
    let (proj, _rest) = out.coeffs.split_at_mut(nproj);
    let mut comps: Vec<&mut [Complex64]> = proj.iter_mut().map(|c| c.as_mut_slice()).collect();
    for flat in 1..n {
        let k = &k_vec[flat];
        let mut k2 = 0.0;
        for axis in 0..nproj {
            k2 += k[axis] * k[axis];
        }
        if k2 == 0.0 {
            continue;
        }
        let mut kdotu = Complex64::default();
        for (axis, comp) in comps.iter().enumerate() {
            kdotu += k[axis] * comp[flat];
        }
        let factor = kdotu / k2;
        for (axis, comp) in comps.iter_mut().enumerate() {
            comp[flat] -= k[axis] * factor;
        }
    }
    out
}

/// Solve `Δu = f` for a zero-mean scalar field; the solution mean is pinned
/// to zero. Rejects data whose mean exceeds `1e−12·‖f‖`.
pub fn poisson_solve(f: &SpectralField) -> Result<SpectralField> {
    assert_eq!(f.ncomp(), 1, "poisson_solve expects a scalar field");
    let norm = f.l2_norm();
    let mean = f.mean(0).norm() * f.grid.volume().sqrt();
    let limit = 1e-12 * norm;
    if norm > 0.0 && mean > limit {
        return Err(SpectralError::NonzeroMean { mean, limit });
    }
    let grid = f.grid.clone();
    let k_sq = grid.k_sq_table();
    let mut out = f.clone();
    out.coeffs[0][0] = Complex64::default();
    for (c, &k2) in out.coeffs[0].iter_mut().zip(k_sq).skip(1) {
        *c /= -k2;
    }
    Ok(out)
}

/// Gaussian mollifier: multiply mode `k` by `e^{−ε²|k|²/2}`. `epsilon = 0`
/// is the identity; the mean is untouched.
pub fn mollify(field: &SpectralField, epsilon: f64) -> SpectralField {
    assert!(epsilon >= 0.0, "mollification width must be nonnegative");
    if epsilon == 0.0 {
        return field.clone();
    }
    let grid = field.grid.clone();
    let k_sq = grid.k_sq_table();
    let mut out = field.clone();
    for comp in &mut out.coeffs {
        for (c, &k2) in comp.iter_mut().zip(k_sq) {
            *c *= (-0.5 * epsilon * epsilon * k2).exp();
        }
    }
    out
}

/// Dealiased pointwise product of two spectral fields (componentwise against
/// a scalar, or component-by-component when shapes match).
pub fn product(a: &SpectralField, b: &SpectralField) -> SpectralField {
    let pa = a.to_physical();
    let pb = b.to_physical();
    let ncomp = a.ncomp().max(b.ncomp());
    assert!(
        a.ncomp() == b.ncomp() || a.ncomp() == 1 || b.ncomp() == 1,
        "product shapes are incompatible"
    );
    let mut data = Vec::with_capacity(ncomp);
    for c in 0..ncomp {
        let ca = &pa.data[c.min(pa.data.len() - 1)];
        let cb = &pb.data[c.min(pb.data.len() - 1)];
        data.push(ca.iter().zip(cb).map(|(&x, &y)| x * y).collect());
    }
    let mut out = crate::field::PhysicalField {
        grid: a.grid.clone(),
        data,
    }
    .to_spectral();
    out.dealias();
    out
}
