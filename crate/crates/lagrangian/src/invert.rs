//! Neumann-series inverse of a near-identity Jacobian field.

use crate::error::{LagrangianError, Result};
use nssl_spectral::TensorField;

/// Invert `∇X = Id + N` by the truncated series `Σ (−N)^k`, certified when
/// `‖N‖_F ≤ 1/2` pointwise. The tail is bounded by `2‖N‖^{terms+1}`; the
/// result additionally satisfies `‖A − Id‖ ≤ 2‖N‖` pointwise.
pub fn invert_jacobian(grad_x: &TensorField, terms: usize) -> Result<TensorField> {
    let deviation = grad_x.max_deviation_from_identity();
    if deviation > 0.5 {
        return Err(LagrangianError::CertifiedRegion { deviation });
    }
    let d = grad_x.ndim;
    let n = grad_x.grid.len();
    let mut out = TensorField::identity(&grad_x.grid);
    for flat in 0..n {
        let m = grad_x.at(flat);
        // N = M − Id
        let mut nmat = m;
        for (i, row) in nmat.iter_mut().enumerate().take(d) {
            row[i] -= 1.0;
        }
        // Horner form: A = Id − N(Id − N(Id − ...)).
        let mut acc = [[0.0f64; 3]; 3];
        for (i, row) in acc.iter_mut().enumerate().take(d) {
            row[i] = 1.0;
        }
        for _ in 0..terms {
            let mut next = [[0.0f64; 3]; 3];
            for i in 0..d {
                for j in 0..d {
                    let mut s = 0.0;
                    for k in 0..d {
                        s += nmat[i][k] * acc[k][j];
                    }
                    next[i][j] = -s;
                }
                next[i][i] += 1.0;
            }
            acc = next;
        }
        out.set_at(flat, &acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nssl_spectral::Grid;

    #[test]
    fn identity_inverts_to_identity() {
        let g = Grid::square_2pi(3, 8).unwrap();
        let id = TensorField::identity(&g);
        let a = invert_jacobian(&id, 5).unwrap();
        assert_eq!(a.max_deviation_from_identity(), 0.0);
    }

    #[test]
    fn nilpotent_shear_terminates_exactly() {
        let g = Grid::square_2pi(3, 8).unwrap();
        let mut m = TensorField::identity(&g);
        for (flat, slot) in m.entry_mut(0, 1).iter_mut().enumerate() {
            *slot = 0.4 * ((flat % 7) as f64 / 7.0);
        }
        // (M − Id)² = 0, so two terms suffice and A = Id − εN exactly.
        let a = invert_jacobian(&m, 2).unwrap();
        let prod = m.matmul(&a);
        assert!(prod.max_deviation_from_identity() < 1e-15);
    }

    #[test]
    fn random_field_matches_exact_inverse() {
        let g = Grid::square_2pi(3, 8).unwrap();
        let mut m = TensorField::identity(&g);
        // Deterministic smooth perturbation with ‖M − Id‖_F = 0.3 max.
        let mut worst = 0.0f64;
        for r in 0..3 {
            for c in 0..3 {
                let comp = m.entry_mut(r, c);
                for (flat, slot) in comp.iter_mut().enumerate() {
                    let phase = (flat as f64) * 0.013 + (r * 3 + c) as f64;
                    *slot += 0.1 * phase.sin();
                }
                let _ = comp;
            }
        }
        for flat in 0..g.len() {
            let mm = m.at(flat);
            let mut f = 0.0;
            for (i, row) in mm.iter().enumerate() {
                for (j, &e) in row.iter().enumerate() {
                    let d = if i == j { e - 1.0 } else { e };
                    f += d * d;
                }
            }
            worst = worst.max(f.sqrt());
        }
        assert!(worst <= 0.5, "construction exceeded the certified region");
        let series = invert_jacobian(&m, 20).unwrap();
        let exact = m.inverse_exact();
        let gap = series.max_frobenius_distance(&exact);
        assert!(gap <= 1e-10, "series vs exact inverse gap {gap:.3e}");
        // ‖A − Id‖ ≤ 2‖M − Id‖ pointwise bound.
        assert!(series.max_deviation_from_identity() <= 2.0 * worst + 1e-12);
    }

    #[test]
    fn outside_certified_region_is_refused() {
        let g = Grid::square_2pi(3, 8).unwrap();
        let mut m = TensorField::identity(&g);
        m.entry_mut(0, 1)[3] = 0.9;
        assert!(matches!(
            invert_jacobian(&m, 8),
            Err(LagrangianError::CertifiedRegion { .. })
        ));
    }
}
