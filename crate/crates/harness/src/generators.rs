//! Named initial-data generators. Deterministic for a fixed seed: the random
//! band generator draws from a counter-seeded ChaCha stream in a fixed mode
//! order, so outputs are bitwise reproducible across runs and thread counts.

use crate::config::Config;
use crate::error::{HarnessError, Result};
use nssl_spectral::{leray_project, mollify, Complex64, Grid, PhysicalField, SpectralField};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const GENERATORS: &[&str] = &[
    "zero",
    "taylor-green",
    "gaussian-bump",
    "random-band",
    "patch-ball",
];

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Velocity generators: a three-component divergence-free field.
pub fn velocity(config: &Config, prefix: &str, grid: &Grid) -> Result<SpectralField> {
    let key = format!("{prefix}.generator");
    let name = config.string(&key, "zero");
    match name.as_str() {
        "zero" => Ok(SpectralField::zeros(grid, 3)),
        "taylor-green" => {
            let amp = config.f64(&format!("{prefix}.amplitude"), 1.0)?;
            let drift = [
                config.f64(&format!("{prefix}.drift_x"), 0.0)?,
                config.f64(&format!("{prefix}.drift_y"), 0.0)?,
            ];
            if grid.ndim() != 2 {
                return Err(config.config_error(&key, "taylor-green lives on a 2D grid"));
            }
            Ok(taylor_green(grid, amp, drift))
        }
        "random-band" => {
            let amp = config.f64(&format!("{prefix}.amplitude"), 1.0)?;
            let seed = config.u64(&format!("{prefix}.seed"), 1)?;
            let k_lo = config.f64(&format!("{prefix}.k_min"), 0.5)?;
            let k_hi = config.f64(&format!("{prefix}.k_max"), 4.5)?;
            let exponent = config.f64(&format!("{prefix}.spectrum_exponent"), 0.0)?;
            let envelope = config.f64(&format!("{prefix}.envelope_radius"), 0.0)?;
            Ok(random_band(grid, amp, seed, k_lo, k_hi, exponent, envelope))
        }
        "gaussian-bump" | "patch-ball" => Err(config.config_error(
            &key,
            format!("generator `{name}` produces a scalar field, not a velocity"),
        )),
        other => Err(config.config_error(
            &key,
            format!("unknown generator `{other}` (known: {})", GENERATORS.join(", ")),
        )),
    }
}

/// Scalar (density-deviation) generators; the result is gated by
/// `‖h₀‖_∞ ≤ 1/2`.
pub fn density(config: &Config, prefix: &str, grid: &Grid) -> Result<SpectralField> {
    let key = format!("{prefix}.generator");
    let name = config.string(&key, "zero");
    let field = match name.as_str() {
        "zero" => SpectralField::zeros(grid, 1),
        "gaussian-bump" => {
            let amp = config.f64(&format!("{prefix}.amplitude"), 0.1)?;
            let radius = config.f64(&format!("{prefix}.radius"), grid.box_lengths()[0] / 8.0)?;
            gaussian_bump(grid, amp, radius)
        }
        "patch-ball" => {
            let eta = config.require_f64(&format!("{prefix}.contrast"))?;
            let radius = config.f64(&format!("{prefix}.radius"), grid.box_lengths()[0] / 8.0)?;
            patch_ball(grid, eta, radius)
        }
        "random-band" => {
            let amp = config.f64(&format!("{prefix}.amplitude"), 0.1)?;
            let seed = config.u64(&format!("{prefix}.seed"), 2)?;
            let k_lo = config.f64(&format!("{prefix}.k_min"), 0.5)?;
            let k_hi = config.f64(&format!("{prefix}.k_max"), 3.5)?;
            let mut f = random_band(grid, 1.0, seed, k_lo, k_hi, 0.0, 0.0).component(0);
            let max = f.to_physical().max_abs();
            if max > 0.0 {
                f.scale(amp / max);
            }
            f
        }
        "taylor-green" => {
            return Err(config.config_error(&key, "taylor-green is a velocity generator"))
        }
        other => {
            return Err(config.config_error(
                &key,
                format!("unknown generator `{other}` (known: {})", GENERATORS.join(", ")),
            ))
        }
    };
    let linf = field.to_physical().max_abs();
    if linf > 0.5 + 1e-3 {
        return Err(config.config_error(
            &key,
            format!(
                "density amplitude ‖h₀‖_∞ = {linf:.3} violates the smallness hypothesis (≤ 1/2)"
            ),
        ));
    }
    Ok(field)
}

/// Three-component Taylor-Green datum with optional mean drift.
pub fn taylor_green(grid: &Grid, amplitude: f64, drift: [f64; 2]) -> SpectralField {
    PhysicalField::fill(grid, 3, |c, x| match c {
        0 => drift[0] - amplitude * x[0].cos() * x[1].sin(),
        1 => drift[1] + amplitude * x[0].sin() * x[1].cos(),
        _ => 0.0,
    })
    .to_spectral()
}

/// Centered Gaussian scalar bump.
pub fn gaussian_bump(grid: &Grid, amplitude: f64, radius: f64) -> SpectralField {
    let centers: Vec<f64> = grid.box_lengths().iter().map(|l| 0.5 * l).collect();
    PhysicalField::fill(grid, 1, |_, x| {
        let mut r2 = 0.0;
        for (a, &c) in centers.iter().enumerate() {
            let l = grid.box_lengths()[a];
            let d = (x[a] - c).abs();
            let d = d.min(l - d);
            r2 += d * d;
        }
        amplitude * (-r2 / (2.0 * radius * radius)).exp()
    })
    .to_spectral()
}

/// Mollified ball indicator `h₀ = −η·1_{B(r)}` smoothed at the grid scale.
pub fn patch_ball(grid: &Grid, eta: f64, radius: f64) -> SpectralField {
    let centers: Vec<f64> = grid.box_lengths().iter().map(|l| 0.5 * l).collect();
    let sharp = PhysicalField::fill(grid, 1, |_, x| {
        let mut r2 = 0.0;
        for (a, &c) in centers.iter().enumerate() {
            let l = grid.box_lengths()[a];
            let d = (x[a] - c).abs();
            let d = d.min(l - d);
            r2 += d * d;
        }
        if r2.sqrt() <= radius {
            -eta
        } else {
            0.0
        }
    })
    .to_spectral();
    mollify(&sharp, grid.min_spacing())
}

/// Seeded, band-limited, divergence-free random field with optional spectral
/// shaping `|k|^exponent` and optional physical Gaussian envelope.
pub fn random_band(
    grid: &Grid,
    amplitude: f64,
    seed: u64,
    k_lo: f64,
    k_hi: f64,
    exponent: f64,
    envelope_radius: f64,
) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ndim = grid.ndim();
    let mut f = SpectralField::zeros(grid, 3);
    // Fixed mode order: iterate the flat index, fill the mode and its mirror
    // once (skip the already-filled mirror halves).
    let n = grid.len();
    let mut idx = vec![0usize; ndim];
    for flat in 0..n {
        grid.unravel(flat, &mut idx);
        let k = grid.wave_vector(flat);
        let k_abs = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        if k_abs < k_lo || k_abs > k_hi {
            continue;
        }
        let mirror: Vec<usize> = (0..ndim)
            .map(|a| (grid.dims()[a] - idx[a]) % grid.dims()[a])
            .collect();
        let mflat = grid.ravel(&mirror);
        if mflat < flat {
            continue; // mirror already filled
        }
        let weight = k_abs.powf(exponent);
        for c in 0..3 {
            let re = (uniform(&mut rng) - 0.5) * weight;
            let im = if mflat == flat {
                0.0
            } else {
                (uniform(&mut rng) - 0.5) * weight
            };
            let val = Complex64::new(re, im);
            f.coeffs[c][flat] += val;
            if mflat != flat {
                f.coeffs[c][mflat] += val.conj();
            }
        }
    }
    if envelope_radius > 0.0 {
        let centers: Vec<f64> = grid.box_lengths().iter().map(|l| 0.5 * l).collect();
        let phys = f.to_physical();
        let mut localized = PhysicalField::zeros(grid, 3);
        let envelope = PhysicalField::fill(grid, 1, |_, x| {
            let mut r2 = 0.0;
            for (a, &c) in centers.iter().enumerate() {
                let l = grid.box_lengths()[a];
                let d = (x[a] - c).abs();
                let d = d.min(l - d);
                r2 += d * d;
            }
            (-r2 / (2.0 * envelope_radius * envelope_radius)).exp()
        });
        for c in 0..3 {
            for i in 0..grid.len() {
                localized.data[c][i] = phys.data[c][i] * envelope.data[0][i];
            }
        }
        f = localized.to_spectral();
    }
    let mut f = leray_project(&f);
    let max = f.to_physical().max_magnitude();
    if max > 0.0 {
        f.scale(amplitude / max);
    }
    f
}

/// Validate a generator name against the registry (for early config checks).
pub fn check_generator_name(config: &Config, key: &str) -> Result<()> {
    if let Some(name) = config.get(key) {
        if !GENERATORS.contains(&name) {
            return Err(HarnessError::Config {
                line: 0,
                message: format!(
                    "key `{key}`: unknown generator `{name}` (known: {})",
                    GENERATORS.join(", ")
                ),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_band_is_bitwise_deterministic() {
        let grid = Grid::square_2pi(3, 16).unwrap();
        let a = random_band(&grid, 0.5, 42, 0.5, 3.5, 0.0, 0.0);
        let b = random_band(&grid, 0.5, 42, 0.5, 3.5, 0.0, 0.0);
        for c in 0..3 {
            for (x, y) in a.coeffs[c].iter().zip(&b.coeffs[c]) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
        let c_field = random_band(&grid, 0.5, 43, 0.5, 3.5, 0.0, 0.0);
        assert!(a.l2_distance(&c_field) > 1e-6);
        // Divergence-free and real.
        assert!(nssl_spectral::divergence(&a).to_physical().max_abs() < 1e-12);
        assert!(a.hermitian_error() < 1e-13);
    }

    #[test]
    fn patch_ball_hits_the_requested_contrast() {
        let grid = Grid::square_2pi(3, 32).unwrap();
        let eta = 0.1;
        let h = patch_ball(&grid, eta, grid.box_lengths()[0] / 8.0);
        let linf = h.to_physical().max_abs();
        assert!(
            (linf - eta).abs() <= 1e-3,
            "patch sup-norm {linf} vs contrast {eta}"
        );
        let mean_ok = h.mean(0).re < 0.0;
        assert!(mean_ok);
    }

    #[test]
    fn density_gate_rejects_large_amplitudes() {
        let config = Config::parse(
            "density.generator = gaussian-bump\ndensity.amplitude = 0.9\n",
        )
        .unwrap();
        let grid = Grid::square_2pi(3, 16).unwrap();
        let err = density(&config, "density", &grid).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("smallness hypothesis"), "{text}");
    }

    #[test]
    fn unknown_generator_is_named_in_the_error() {
        let config = Config::parse("initial.generator = vortex-soup\n").unwrap();
        let grid = Grid::square_2pi(2, 16).unwrap();
        let err = velocity(&config, "initial", &grid).unwrap_err();
        assert!(err.to_string().contains("vortex-soup"));
    }
}
