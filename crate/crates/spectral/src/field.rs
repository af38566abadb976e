use crate::error::{Result, SpectralError};
use crate::fft;
use crate::grid::Grid;
use num_complex::Complex64;
use rayon::prelude::*;

/// Real scalar or vector field sampled on the physical grid.
///
/// Component-major storage: `data[c]` holds the row-major samples of
/// component `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    pub grid: Grid,
    pub data: Vec<Vec<f64>>,
}

impl PhysicalField {
    pub fn zeros(grid: &Grid, ncomp: usize) -> Self {
        PhysicalField {
            grid: grid.clone(),
            data: vec![vec![0.0; grid.len()]; ncomp],
        }
    }

    pub fn from_components(grid: &Grid, data: Vec<Vec<f64>>) -> Result<Self> {
        for comp in &data {
            if comp.len() != grid.len() {
                return Err(SpectralError::ShapeMismatch {
                    expected: grid.len(),
                    got: comp.len(),
                });
            }
        }
        Ok(PhysicalField {
            grid: grid.clone(),
            data,
        })
    }

    /// Fill component `c` by evaluating `f` at the physical coordinates.
    pub fn fill(grid: &Grid, ncomp: usize, f: impl Fn(usize, &[f64; 3]) -> f64 + Sync) -> Self {
        let mut out = Self::zeros(grid, ncomp);
        let ndim = grid.ndim();
        let fill_comp = |c: usize, data: &mut [f64], g: &Grid| {
            data.par_iter_mut().enumerate().for_each(|(flat, value)| {
                let mut idx = [0usize; 3];
                g.unravel(flat, &mut idx[..ndim]);
                let mut x = [0.0f64; 3];
                for axis in 0..ndim {
                    x[axis] = g.coordinate(axis, idx[axis]);
                }
                *value = f(c, &x);
            });
        };
        let g = out.grid.clone();
        for c in 0..ncomp {
            fill_comp(c, &mut out.data[c], &g);
        }
        out
    }

    pub fn ncomp(&self) -> usize {
        self.data.len()
    }

    /// Forward transform to Fourier coefficients.
    pub fn to_spectral(&self) -> SpectralField {
        let dims = self.grid.dims().to_vec();
        let coeffs = self
            .data
            .iter()
            .map(|comp| {
                let mut buf: Vec<Complex64> =
                    comp.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                fft::forward(&mut buf, &dims);
                buf
            })
            .collect();
        SpectralField {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|comp| comp.iter())
            .fold(0.0f64, |acc, &v| acc.max(v.abs()))
    }

    /// Pointwise Euclidean magnitude over components, maximized over the grid.
    pub fn max_magnitude(&self) -> f64 {
        let n = self.grid.len();
        let mut max = 0.0f64;
        for i in 0..n {
            let mut s = 0.0;
            for comp in &self.data {
                s += comp[i] * comp[i];
            }
            max = max.max(s);
        }
        max.sqrt()
    }
}

/// Fourier-coefficient representation of a real field on a periodic grid.
///
/// The modal convention is `f(x) = Σ_k ĉ(k) e^{i k·x}`, so `ĉ(0)` is the
/// field mean and real fields satisfy `ĉ(−k) = conj(ĉ(k))`.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub grid: Grid,
    pub coeffs: Vec<Vec<Complex64>>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid, ncomp: usize) -> Self {
        SpectralField {
            grid: grid.clone(),
            coeffs: vec![vec![Complex64::default(); grid.len()]; ncomp],
        }
    }

    pub fn ncomp(&self) -> usize {
        self.coeffs.len()
    }

    /// Inverse transform to physical samples (imaginary round-off discarded).
    pub fn to_physical(&self) -> PhysicalField {
        let dims = self.grid.dims().to_vec();
        let data = self
            .coeffs
            .iter()
            .map(|comp| {
                let mut buf = comp.clone();
                fft::inverse(&mut buf, &dims);
                buf.into_iter().map(|c| c.re).collect()
            })
            .collect();
        PhysicalField {
            grid: self.grid.clone(),
            data,
        }
    }

    pub fn mean(&self, comp: usize) -> Complex64 {
        self.coeffs[comp][0]
    }

    pub fn set_mean(&mut self, comp: usize, value: f64) {
        self.coeffs[comp][0] = Complex64::new(value, 0.0);
    }

    /// Zero every mode outside the grid's dealias mask.
    pub fn dealias(&mut self) {
        let grid = self.grid.clone();
        let keep = grid.dealias_keep();
        for comp in &mut self.coeffs {
            for (c, &k) in comp.iter_mut().zip(keep) {
                if !k {
                    *c = Complex64::default();
                }
            }
        }
    }

    /// Worst deviation from Hermitian symmetry, `max_k |ĉ(−k) − conj ĉ(k)|`.
    pub fn hermitian_error(&self) -> f64 {
        let grid = &self.grid;
        let ndim = grid.ndim();
        let mut worst = 0.0f64;
        let mut idx = [0usize; 3];
        let mut mirror = [0usize; 3];
        for comp in &self.coeffs {
            for flat in 0..grid.len() {
                grid.unravel(flat, &mut idx[..ndim]);
                for axis in 0..ndim {
                    let n = grid.dims()[axis];
                    mirror[axis] = (n - idx[axis]) % n;
                }
                let flat_m = grid.ravel(&mirror[..ndim]);
                let err = (comp[flat_m] - comp[flat].conj()).norm();
                worst = worst.max(err);
            }
        }
        worst
    }

    /// L2 norm via Parseval: `(V · Σ_k |ĉ(k)|²)^{1/2}` summed over components.
    pub fn l2_norm(&self) -> f64 {
        let v = self.grid.volume();
        let sum: f64 = self
            .coeffs
            .iter()
            .map(|comp| comp.iter().map(|c| c.norm_sqr()).sum::<f64>())
            .sum();
        (v * sum).sqrt()
    }

    /// L2 norm of the gradient via Parseval.
    pub fn h1_seminorm(&self) -> f64 {
        let v = self.grid.volume();
        let k_sq = self.grid.k_sq_table();
        let mut sum = 0.0;
        for comp in &self.coeffs {
            for (c, &k2) in comp.iter().zip(k_sq) {
                sum += k2 * c.norm_sqr();
            }
        }
        (v * sum).sqrt()
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|comp| comp.iter())
            .fold(0.0f64, |acc, c| acc.max(c.norm()))
    }

    pub fn has_non_finite(&self) -> bool {
        self.coeffs
            .iter()
            .any(|comp| comp.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()))
    }

    pub fn assert_same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        Ok(())
    }

    /// `self += scale · other`, componentwise.
    pub fn axpy(&mut self, scale: f64, other: &SpectralField) {
        assert_eq!(self.ncomp(), other.ncomp());
        for (dst, src) in self.coeffs.iter_mut().zip(&other.coeffs) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += scale * s;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for comp in &mut self.coeffs {
            for c in comp.iter_mut() {
                *c *= factor;
            }
        }
    }

    /// L2 norm of `self − other`.
    pub fn l2_distance(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.ncomp(), other.ncomp());
        let v = self.grid.volume();
        let mut sum = 0.0;
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            for (ca, cb) in a.iter().zip(b) {
                sum += (ca - cb).norm_sqr();
            }
        }
        (v * sum).sqrt()
    }

    /// Extract a single component as a scalar field (cheap clone of one plane).
    pub fn component(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            coeffs: vec![self.coeffs[c].clone()],
        }
    }

    /// Bundle scalar fields into one multi-component field.
    pub fn from_components(parts: Vec<SpectralField>) -> SpectralField {
        assert!(!parts.is_empty());
        let grid = parts[0].grid.clone();
        let coeffs = parts
            .into_iter()
            .flat_map(|p| {
                assert_eq!(p.grid, grid);
                p.coeffs
            })
            .collect();
        SpectralField { grid, coeffs }
    }
}

/// Forward transform of physical samples with shape validation.
pub fn transform(grid: &Grid, samples: &[Vec<f64>]) -> Result<SpectralField> {
    let field = PhysicalField::from_components(grid, samples.to_vec())?;
    Ok(field.to_spectral())
}
