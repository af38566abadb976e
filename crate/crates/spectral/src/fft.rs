//! Thin wrapper over rustfft: multi-dimensional complex transforms applied
//! axis by axis on row-major data (last axis contiguous).

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().unwrap();
    cache
        .entry((len, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(len)
            } else {
                planner.plan_fft_inverse(len)
            }
        })
        .clone()
}

/// Below this element count the transforms run serially; thread fan-out
/// costs more than it saves on small grids.
const PAR_THRESHOLD: usize = 1 << 15;

/// In-place unnormalized DFT along one axis. `forward` selects the sign
/// `e^{-ikx}`; the inverse is the plain conjugate sum without the `1/n`
/// factor.
pub fn transform_axis(data: &mut [Complex64], dims: &[usize], axis: usize, forward: bool) {
    let n = dims[axis];
    let stride: usize = dims[axis + 1..].iter().product();
    let total = data.len();
    let fft = plan(n, forward);

    if total < PAR_THRESHOLD {
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        if stride == 1 {
            for chunk in data.chunks_mut(n) {
                fft.process_with_scratch(chunk, scratch.as_mut_slice());
            }
        } else {
            let block_span = n * stride;
            let mut line = vec![Complex64::default(); n];
            for b in 0..total / block_span {
                for o in 0..stride {
                    let base = b * block_span + o;
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + j * stride];
                    }
                    fft.process_with_scratch(&mut line, scratch.as_mut_slice());
                    for (j, &value) in line.iter().enumerate() {
                        data[base + j * stride] = value;
                    }
                }
            }
        }
        return;
    }

    if stride == 1 {
        data.par_chunks_mut(n).for_each_init(
            || vec![Complex64::default(); fft.get_inplace_scratch_len()],
            |scratch, chunk| fft.process_with_scratch(chunk, scratch),
        );
        return;
    }

    // Strided axis: gather each line into a contiguous scratch array,
    // transform there, then scatter back. Line L = b·stride + o collects the
    // elements data[b·n·stride + j·stride + o], j = 0..n.
    let block_span = n * stride;
    let mut lines = vec![Complex64::default(); total];
    {
        let src = &*data;
        lines
            .par_chunks_mut(n)
            .enumerate()
            .for_each_init(
                || vec![Complex64::default(); fft.get_inplace_scratch_len()],
                |scratch, (line_idx, line)| {
                    let b = line_idx / stride;
                    let o = line_idx % stride;
                    let base = b * block_span + o;
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = src[base + j * stride];
                    }
                    fft.process_with_scratch(line, scratch);
                },
            );
    }
    if axis == 0 {
        // Single block; scatter row by row (row j owns data[j·stride..][..stride]).
        data.par_chunks_mut(stride).enumerate().for_each(|(j, row)| {
            for (o, slot) in row.iter_mut().enumerate() {
                *slot = lines[o * n + j];
            }
        });
    } else {
        data.par_chunks_mut(block_span)
            .enumerate()
            .for_each(|(b, block)| {
                for o in 0..stride {
                    let line = &lines[(b * stride + o) * n..][..n];
                    for (j, &value) in line.iter().enumerate() {
                        block[j * stride + o] = value;
                    }
                }
            });
    }
}

/// Forward multi-dimensional transform with `1/N` normalization, so the
/// coefficient at `k = 0` equals the field mean.
pub fn forward(data: &mut [Complex64], dims: &[usize]) {
    for axis in 0..dims.len() {
        transform_axis(data, dims, axis, true);
    }
    let scale = 1.0 / dims.iter().product::<usize>() as f64;
    if data.len() < PAR_THRESHOLD {
        data.iter_mut().for_each(|c| *c *= scale);
    } else {
        data.par_iter_mut().for_each(|c| *c *= scale);
    }
}

/// Inverse multi-dimensional transform (plain modal sum, no scaling).
pub fn inverse(data: &mut [Complex64], dims: &[usize]) {
    for axis in 0..dims.len() {
        transform_axis(data, dims, axis, false);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_then_inverse_is_identity() {
        let dims = [8usize, 12, 10];
        let n: usize = dims.iter().product();
        let orig: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut data = orig.clone();
        forward(&mut data, &dims);
        inverse(&mut data, &dims);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_harmonic_lands_on_one_mode() {
        let dims = [16usize, 8];
        let n: usize = dims.iter().product();
        let mut data = vec![Complex64::default(); n];
        for i0 in 0..dims[0] {
            for i1 in 0..dims[1] {
                let x = 2.0 * std::f64::consts::PI * i0 as f64 / dims[0] as f64;
                data[i0 * dims[1] + i1] = Complex64::new((3.0 * x).cos(), 0.0);
            }
        }
        forward(&mut data, &dims);
        for i0 in 0..dims[0] {
            for i1 in 0..dims[1] {
                let c = data[i0 * dims[1] + i1];
                let expect = if i1 == 0 && (i0 == 3 || i0 == 16 - 3) {
                    0.5
                } else {
                    0.0
                };
                assert!((c - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }
}
