use crate::error::{Result, SpectralError};
use std::sync::Arc;

/// Precomputed per-mode tables, shared by every field on the grid.
#[derive(Debug)]
struct ModeTables {
    /// Per-axis signed wavenumbers, indexed by the raw mode index.
    wavenumbers: Vec<Vec<f64>>,
    /// Wave vector per flat mode index (third entry zero in 2D).
    k_vec: Vec<[f64; 3]>,
    /// `|k|²` per flat mode index.
    k_sq: Vec<f64>,
    /// Dealias mask per flat mode index (true = keep).
    keep: Vec<bool>,
}

/// Uniform periodic grid in two or three dimensions.
///
/// Axis `j` carries `dims[j]` samples over a period `box_lengths[j]`, so the
/// wavenumber attached to index `m` is `2π·m̃/L_j` where `m̃` is the signed
/// alias of `m` (indices above `n/2` wrap to negative frequencies).
#[derive(Debug, Clone)]
pub struct Grid {
    dims: Vec<usize>,
    box_lengths: Vec<f64>,
    dealias_fraction: f64,
    tables: Arc<ModeTables>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims
            && self.box_lengths == other.box_lengths
            && self.dealias_fraction == other.dealias_fraction
    }
}

pub const DEFAULT_DEALIAS_FRACTION: f64 = 2.0 / 3.0;

fn build_tables(dims: &[usize], box_lengths: &[f64], dealias_fraction: f64) -> ModeTables {
    let wavenumbers: Vec<Vec<f64>> = dims
        .iter()
        .zip(box_lengths)
        .map(|(&n, &l)| {
            (0..n)
                .map(|m| 2.0 * std::f64::consts::PI * signed_alias(m, n) as f64 / l)
                .collect()
        })
        .collect();
    let total: usize = dims.iter().product();
    let ndim = dims.len();
    let mut k_vec = vec![[0.0f64; 3]; total];
    let mut k_sq = vec![0.0f64; total];
    let mut keep = vec![true; total];
    let mut idx = vec![0usize; ndim];
    for flat in 0..total {
        let mut rem = flat;
        for axis in (0..ndim).rev() {
            idx[axis] = rem % dims[axis];
            rem /= dims[axis];
        }
        let mut sq = 0.0;
        let mut kept = true;
        for axis in 0..ndim {
            let k = wavenumbers[axis][idx[axis]];
            k_vec[flat][axis] = k;
            sq += k * k;
            let cutoff = dealias_fraction * (dims[axis] / 2) as f64;
            if (signed_alias(idx[axis], dims[axis]).unsigned_abs() as f64) > cutoff {
                kept = false;
            }
        }
        k_sq[flat] = sq;
        keep[flat] = kept;
    }
    ModeTables {
        wavenumbers,
        k_vec,
        k_sq,
        keep,
    }
}

impl Grid {
    pub fn new(dims: &[usize], box_lengths: &[f64]) -> Result<Self> {
        if dims.len() != 2 && dims.len() != 3 {
            return Err(SpectralError::InvalidGrid(format!(
                "supported dimensions are 2 and 3, got {}",
                dims.len()
            )));
        }
        if dims.len() != box_lengths.len() {
            return Err(SpectralError::InvalidGrid(
                "dims and box_lengths disagree".into(),
            ));
        }
        for (&n, &l) in dims.iter().zip(box_lengths) {
            if n < 8 || n % 2 != 0 {
                return Err(SpectralError::InvalidGrid(format!(
                    "mode count per axis must be even and at least 8, got {n}"
                )));
            }
            if !(l > 0.0) || !l.is_finite() {
                return Err(SpectralError::InvalidGrid(format!(
                    "box length must be positive and finite, got {l}"
                )));
            }
        }
        let tables = build_tables(dims, box_lengths, DEFAULT_DEALIAS_FRACTION);
        Ok(Grid {
            dims: dims.to_vec(),
            box_lengths: box_lengths.to_vec(),
            dealias_fraction: DEFAULT_DEALIAS_FRACTION,
            tables: Arc::new(tables),
        })
    }

    pub fn new_2d(n0: usize, n1: usize, l0: f64, l1: f64) -> Result<Self> {
        Self::new(&[n0, n1], &[l0, l1])
    }

    pub fn new_3d(n0: usize, n1: usize, n2: usize, l0: f64, l1: f64, l2: f64) -> Result<Self> {
        Self::new(&[n0, n1, n2], &[l0, l1, l2])
    }

    /// Square/cubic box `[0, 2π)^n`.
    pub fn square_2pi(ndim: usize, n: usize) -> Result<Self> {
        let tau = 2.0 * std::f64::consts::PI;
        Self::new(&vec![n; ndim], &vec![tau; ndim])
    }

    pub fn with_dealias_fraction(mut self, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(SpectralError::InvalidGrid(format!(
                "dealias fraction must lie in (0, 1], got {fraction}"
            )));
        }
        self.dealias_fraction = fraction;
        self.tables = Arc::new(build_tables(&self.dims, &self.box_lengths, fraction));
        Ok(self)
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn box_lengths(&self) -> &[f64] {
        &self.box_lengths
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Total number of samples (= number of Fourier modes).
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical volume of the box.
    pub fn volume(&self) -> f64 {
        self.box_lengths.iter().product()
    }

    /// Quadrature weight of one sample, `prod_j L_j/n_j`.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.box_lengths[axis] / self.dims[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.ndim())
            .map(|a| self.spacing(a))
            .fold(f64::INFINITY, f64::min)
    }

    /// Physical coordinate of sample `m` on `axis`.
    pub fn coordinate(&self, axis: usize, m: usize) -> f64 {
        m as f64 * self.spacing(axis)
    }

    /// Signed wavenumber of raw mode index `m` on `axis`.
    pub fn wavenumber(&self, axis: usize, m: usize) -> f64 {
        self.tables.wavenumbers[axis][m]
    }

    pub fn wavenumbers(&self, axis: usize) -> &[f64] {
        &self.tables.wavenumbers[axis]
    }

    /// Decompose a flat (row-major, last axis contiguous) index into per-axis
    /// mode indices.
    pub fn unravel(&self, mut idx: usize, out: &mut [usize]) {
        for axis in (0..self.dims.len()).rev() {
            out[axis] = idx % self.dims[axis];
            idx /= self.dims[axis];
        }
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (axis, &i) in idx.iter().enumerate() {
            flat = flat * self.dims[axis] + i;
        }
        flat
    }

    /// Wave vector of the flat mode index, padded with zeros beyond `ndim`.
    #[inline]
    pub fn wave_vector(&self, flat: usize) -> [f64; 3] {
        self.tables.k_vec[flat]
    }

    /// `|k|²` of the flat mode index.
    #[inline]
    pub fn k_sq(&self, flat: usize) -> f64 {
        self.tables.k_sq[flat]
    }

    /// Full `|k|²` table.
    #[inline]
    pub fn k_sq_table(&self) -> &[f64] {
        &self.tables.k_sq
    }

    /// Full wave-vector table.
    #[inline]
    pub fn k_vec_table(&self) -> &[[f64; 3]] {
        &self.tables.k_vec
    }

    /// Dealias mask: true where the mode survives (`|m̃| ≤ fraction·n/2` on
    /// every axis).
    #[inline]
    pub fn dealias_keep(&self) -> &[bool] {
        &self.tables.keep
    }

    /// True when the per-axis mode indices survive the dealias mask.
    pub fn mode_kept(&self, idx: &[usize]) -> bool {
        self.tables.keep[self.ravel(idx)]
    }

    /// Largest resolvable |k| over all axes (the Nyquist of the finest axis).
    pub fn max_wavenumber(&self) -> f64 {
        (0..self.ndim())
            .map(|axis| std::f64::consts::PI * self.dims[axis] as f64 / self.box_lengths[axis])
            .fold(0.0, f64::max)
    }
}

/// Signed alias of a raw DFT index: `m` for `m < n/2`, else `m − n`.
pub fn signed_alias(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}
