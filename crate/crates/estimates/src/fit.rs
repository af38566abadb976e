//! Log–log least-squares decay fits.

use crate::error::{EstimatesError, Result};

#[derive(Debug, Clone)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub window: (f64, f64),
    /// Set when the probe flagged boundary contamination inside the window.
    pub contaminated: bool,
}

const MIN_SAMPLES: usize = 8;

/// Fit `log value ~ slope · log t + intercept` over the samples falling in
/// `window`. Requires at least eight positive samples.
pub fn decay_fit(points: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let selected: Vec<(f64, f64)> = points
        .iter()
        .filter(|(t, v)| *t >= window.0 && *t <= window.1 && *t > 0.0 && *v > 0.0)
        .map(|&(t, v)| (t.ln(), v.ln()))
        .collect();
    if selected.len() < MIN_SAMPLES {
        return Err(EstimatesError::WindowTooSmall {
            have: selected.len(),
            need: MIN_SAMPLES,
        });
    }
    let n = selected.len() as f64;
    let sx: f64 = selected.iter().map(|p| p.0).sum();
    let sy: f64 = selected.iter().map(|p| p.1).sum();
    let sxx: f64 = selected.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = selected.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = selected.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = selected
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(DecayFit {
        slope,
        intercept,
        r2,
        window,
        contaminated: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_recovers_exponent() {
        let alpha = -1.5;
        let pts: Vec<(f64, f64)> = (1..=40)
            .map(|i| {
                let t = 0.2 * i as f64;
                (t, 3.7 * t.powf(alpha))
            })
            .collect();
        let fit = decay_fit(&pts, (0.0, 10.0)).unwrap();
        assert!((fit.slope - alpha).abs() < 1e-10);
        assert!((fit.intercept - 3.7f64.ln()).abs() < 1e-10);
        assert!(fit.r2 > 1.0 - 1e-12);
    }

    #[test]
    fn noisy_power_law_within_tolerance() {
        // Deterministic 1% multiplicative "noise".
        let alpha = -0.5;
        let pts: Vec<(f64, f64)> = (1..=60)
            .map(|i| {
                let t = 0.5 + 0.25 * i as f64;
                let noise = 1.0 + 0.01 * ((i as f64) * 2.399963).sin();
                (t, 2.0 * t.powf(alpha) * noise)
            })
            .collect();
        let fit = decay_fit(&pts, (0.0, 100.0)).unwrap();
        assert!((fit.slope - alpha).abs() < 0.05);
        assert!(fit.r2 >= 0.99);
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let pts: Vec<(f64, f64)> = (1..=5).map(|i| (i as f64, 1.0 / i as f64)).collect();
        assert!(matches!(
            decay_fit(&pts, (0.0, 10.0)),
            Err(EstimatesError::WindowTooSmall { .. })
        ));
    }
}
