//! Periodic cubic (4-point Lagrange) interpolation on physical fields.

use crate::field::PhysicalField;

/// Lagrange weights for interpolation at fractional offset `s ∈ [0,1)` past
/// the stencil's second node.
#[inline]
fn cubic_weights(s: f64) -> [f64; 4] {
    let s2 = s * s;
    let s3 = s2 * s;
    [
        -(s3 - 3.0 * s2 + 2.0 * s) / 6.0,
        (s3 - 2.0 * s2 - s + 2.0) / 2.0,
        -(s3 - s2 - 2.0 * s) / 2.0,
        (s3 - s) / 6.0,
    ]
}

/// Stencil support per axis: node index offsets −1..=2 around the base cell.
#[inline]
fn axis_stencil(x: f64, spacing: f64, n: usize) -> ([usize; 4], [f64; 4]) {
    let pos = x / spacing;
    let base = pos.floor();
    let s = pos - base;
    let b = base as i64;
    let ni = n as i64;
    let mut idx = [0usize; 4];
    for (j, slot) in idx.iter_mut().enumerate() {
        *slot = (b + j as i64 - 1).rem_euclid(ni) as usize;
    }
    (idx, cubic_weights(s))
}

impl PhysicalField {
    /// Sample one component at an arbitrary physical point (periodic wrap).
    pub fn sample_cubic(&self, comp: usize, point: &[f64; 3]) -> f64 {
        let grid = &self.grid;
        let ndim = grid.ndim();
        let data = &self.data[comp];
        match ndim {
            2 => {
                let (i0, w0) = axis_stencil(point[0], grid.spacing(0), grid.dims()[0]);
                let (i1, w1) = axis_stencil(point[1], grid.spacing(1), grid.dims()[1]);
                let n1 = grid.dims()[1];
                let mut acc = 0.0;
                for a in 0..4 {
                    let row = i0[a] * n1;
                    let mut inner = 0.0;
                    for b in 0..4 {
                        inner += w1[b] * data[row + i1[b]];
                    }
                    acc += w0[a] * inner;
                }
                acc
            }
            3 => {
                let (i0, w0) = axis_stencil(point[0], grid.spacing(0), grid.dims()[0]);
                let (i1, w1) = axis_stencil(point[1], grid.spacing(1), grid.dims()[1]);
                let (i2, w2) = axis_stencil(point[2], grid.spacing(2), grid.dims()[2]);
                let n1 = grid.dims()[1];
                let n2 = grid.dims()[2];
                let mut acc = 0.0;
                for a in 0..4 {
                    let plane = i0[a] * n1;
                    let mut acc1 = 0.0;
                    for b in 0..4 {
                        let row = (plane + i1[b]) * n2;
                        let mut inner = 0.0;
                        for c in 0..4 {
                            inner += w2[c] * data[row + i2[c]];
                        }
                        acc1 += w1[b] * inner;
                    }
                    acc += w0[a] * acc1;
                }
                acc
            }
            _ => unreachable!(),
        }
    }

    /// Sample every component at a point.
    pub fn sample_vector(&self, point: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (c, slot) in out.iter_mut().enumerate().take(self.ncomp()) {
            *slot = self.sample_cubic(c, point);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn interpolation_exact_on_nodes_and_constants() {
        let g = Grid::square_2pi(2, 16).unwrap();
        let f = PhysicalField::fill(&g, 1, |_, x| 1.0 + x[0].sin() * x[1].cos());
        // On a node:
        let p = [g.coordinate(0, 5), g.coordinate(1, 9), 0.0];
        let got = f.sample_cubic(0, &p);
        assert!((got - (1.0 + p[0].sin() * p[1].cos())).abs() < 1e-14);
        // Constants are exact anywhere (weights sum to one):
        let c = PhysicalField::fill(&g, 1, |_, _| 2.75);
        assert!((c.sample_cubic(0, &[0.123, 5.4, 0.0]) - 2.75).abs() < 1e-13);
    }

    #[test]
    fn interpolation_fourth_order_on_smooth_fields() {
        let mut errs = Vec::new();
        for n in [16usize, 32] {
            let g = Grid::square_2pi(2, n).unwrap();
            let f = PhysicalField::fill(&g, 1, |_, x| (x[0]).sin() * (x[1]).cos());
            let mut max_err = 0.0f64;
            for i in 0..50 {
                let x = 0.37 + 0.11 * i as f64;
                let y = 1.91 + 0.07 * i as f64;
                let exact = x.sin() * y.cos();
                let got = f.sample_cubic(0, &[x, y, 0.0]);
                max_err = max_err.max((got - exact).abs());
            }
            errs.push(max_err);
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 3.5, "observed order {order}, errors {errs:?}");
    }

    #[test]
    fn periodic_wrap_is_seamless() {
        let g = Grid::square_2pi(2, 16).unwrap();
        let f = PhysicalField::fill(&g, 1, |_, x| (x[0]).sin());
        let tau = 2.0 * std::f64::consts::PI;
        let a = f.sample_cubic(0, &[-0.1, 1.0, 0.0]);
        let b = f.sample_cubic(0, &[tau - 0.1, 1.0, 0.0]);
        assert!((a - b).abs() < 1e-13);
    }
}
