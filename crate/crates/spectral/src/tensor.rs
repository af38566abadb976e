//! Matrix-valued fields on a grid (Jacobians, their inverses, twist matrices).

use crate::field::PhysicalField;
use crate::grid::Grid;

/// Pointwise `ndim × ndim` matrix field, row-major component storage:
/// `comps[r·ndim + c]` holds entry `(r, c)` at every grid sample.
#[derive(Debug, Clone)]
pub struct TensorField {
    pub grid: Grid,
    pub ndim: usize,
    pub comps: Vec<Vec<f64>>,
}

impl TensorField {
    pub fn identity(grid: &Grid) -> Self {
        let ndim = grid.ndim();
        let n = grid.len();
        let comps = (0..ndim * ndim)
            .map(|rc| {
                let (r, c) = (rc / ndim, rc % ndim);
                vec![if r == c { 1.0 } else { 0.0 }; n]
            })
            .collect();
        TensorField {
            grid: grid.clone(),
            ndim,
            comps,
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        let ndim = grid.ndim();
        TensorField {
            grid: grid.clone(),
            ndim,
            comps: vec![vec![0.0; grid.len()]; ndim * ndim],
        }
    }

    pub fn entry(&self, r: usize, c: usize) -> &[f64] {
        &self.comps[r * self.ndim + c]
    }

    pub fn entry_mut(&mut self, r: usize, c: usize) -> &mut [f64] {
        &mut self.comps[r * self.ndim + c]
    }

    /// Matrix at one sample.
    pub fn at(&self, flat: usize) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for r in 0..self.ndim {
            for c in 0..self.ndim {
                m[r][c] = self.comps[r * self.ndim + c][flat];
            }
        }
        m
    }

    pub fn set_at(&mut self, flat: usize, m: &[[f64; 3]; 3]) {
        for r in 0..self.ndim {
            for c in 0..self.ndim {
                self.comps[r * self.ndim + c][flat] = m[r][c];
            }
        }
    }

    /// Pointwise product `self · other`.
    pub fn matmul(&self, other: &TensorField) -> TensorField {
        assert_eq!(self.ndim, other.ndim);
        let mut out = TensorField::zeros(&self.grid);
        let d = self.ndim;
        for r in 0..d {
            for c in 0..d {
                let dst = &mut out.comps[r * d + c];
                for k in 0..d {
                    let a = &self.comps[r * d + k];
                    let b = &other.comps[k * d + c];
                    for (slot, (&x, &y)) in dst.iter_mut().zip(a.iter().zip(b)) {
                        *slot += x * y;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> TensorField {
        let mut out = self.clone();
        let d = self.ndim;
        for r in 0..d {
            for c in 0..d {
                out.comps[r * d + c] = self.comps[c * d + r].clone();
            }
        }
        out
    }

    /// Pointwise determinant.
    pub fn determinant(&self) -> Vec<f64> {
        let n = self.grid.len();
        let d = self.ndim;
        let mut det = vec![0.0; n];
        for (flat, slot) in det.iter_mut().enumerate() {
            let m = self.at(flat);
            *slot = if d == 2 {
                m[0][0] * m[1][1] - m[0][1] * m[1][0]
            } else {
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            };
        }
        det
    }

    /// Pointwise exact inverse via cofactors.
    pub fn inverse_exact(&self) -> TensorField {
        let mut out = TensorField::zeros(&self.grid);
        let d = self.ndim;
        for flat in 0..self.grid.len() {
            let m = self.at(flat);
            let mut inv = [[0.0; 3]; 3];
            if d == 2 {
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                inv[0][0] = m[1][1] / det;
                inv[0][1] = -m[0][1] / det;
                inv[1][0] = -m[1][0] / det;
                inv[1][1] = m[0][0] / det;
            } else {
                let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
                let cof = |r: usize, c: usize| -> f64 {
                    let rs: Vec<usize> = (0..3).filter(|&i| i != r).collect();
                    let cs: Vec<usize> = (0..3).filter(|&i| i != c).collect();
                    let minor = m[rs[0]][cs[0]] * m[rs[1]][cs[1]] - m[rs[0]][cs[1]] * m[rs[1]][cs[0]];
                    if (r + c) % 2 == 0 {
                        minor
                    } else {
                        -minor
                    }
                };
                for r in 0..3 {
                    for c in 0..3 {
                        inv[r][c] = cof(c, r) / det;
                    }
                }
            }
            out.set_at(flat, &inv);
        }
        out
    }

    /// Pointwise Frobenius norm, maximized over the grid.
    pub fn max_frobenius(&self) -> f64 {
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for flat in 0..n {
            let mut s = 0.0;
            for comp in &self.comps {
                s += comp[flat] * comp[flat];
            }
            worst = worst.max(s);
        }
        worst.sqrt()
    }

    /// `max_x ‖self(x) − other(x)‖_F`.
    pub fn max_frobenius_distance(&self, other: &TensorField) -> f64 {
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for flat in 0..n {
            let mut s = 0.0;
            for (a, b) in self.comps.iter().zip(&other.comps) {
                let d = a[flat] - b[flat];
                s += d * d;
            }
            worst = worst.max(s);
        }
        worst.sqrt()
    }

    /// `max_x ‖self(x) − Id‖_F`.
    pub fn max_deviation_from_identity(&self) -> f64 {
        self.max_frobenius_distance(&TensorField::identity(&self.grid))
    }

    /// L2 norm over the box of the pointwise Frobenius norm.
    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.cell_volume();
        let mut sum = 0.0;
        for comp in &self.comps {
            for &v in comp {
                sum += v * v;
            }
        }
        (w * sum).sqrt()
    }

    /// Apply pointwise to a vector field: `(A v)(x) = A(x) v(x)`.
    pub fn apply(&self, v: &PhysicalField) -> PhysicalField {
        assert_eq!(v.ncomp(), self.ndim);
        let mut out = PhysicalField::zeros(&self.grid, self.ndim);
        let d = self.ndim;
        for r in 0..d {
            for c in 0..d {
                let m = &self.comps[r * d + c];
                let src = &v.data[c];
                let dst = &mut out.data[r];
                for (slot, (&a, &x)) in dst.iter_mut().zip(m.iter().zip(src)) {
                    *slot += a * x;
                }
            }
        }
        out
    }

    /// Pointwise double contraction with the gradient of a vector field:
    /// `Aᵀ : ∇z = Σ_{rc} A(r,c) ∂r z_c`. `grad_z.data[r·d + c]` must hold
    /// `∂r z_c`.
    pub fn transpose_contract(&self, grad_z: &PhysicalField) -> PhysicalField {
        let d = self.ndim;
        assert_eq!(grad_z.ncomp(), d * d);
        let mut out = PhysicalField::zeros(&self.grid, 1);
        for r in 0..d {
            for c in 0..d {
                let a = &self.comps[r * d + c];
                let g = &grad_z.data[r * d + c];
                let dst = &mut out.data[0];
                for (slot, (&x, &y)) in dst.iter_mut().zip(a.iter().zip(g)) {
                    *slot += x * y;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_shear_is_negated_shear() {
        let g = Grid::square_2pi(3, 8).unwrap();
        let mut m = TensorField::identity(&g);
        for (flat, slot) in m.entry_mut(0, 1).iter_mut().enumerate() {
            *slot = 0.3 * (flat as f64 * 0.01).sin();
        }
        let inv = m.inverse_exact();
        let prod = m.matmul(&inv);
        assert!(prod.max_deviation_from_identity() < 1e-14);
        let det = m.determinant();
        for d in det {
            assert!((d - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn apply_matches_manual_matvec() {
        let g = Grid::square_2pi(2, 8).unwrap();
        let mut m = TensorField::identity(&g);
        m.entry_mut(0, 1)[5] = 2.0;
        let mut v = PhysicalField::zeros(&g, 2);
        v.data[0][5] = 1.0;
        v.data[1][5] = 3.0;
        let out = m.apply(&v);
        assert_eq!(out.data[0][5], 7.0);
        assert_eq!(out.data[1][5], 3.0);
    }
}
