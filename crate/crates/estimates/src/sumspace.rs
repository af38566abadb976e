//! Mixed space-time norms and the two-part sum-space norm used for the
//! time-derivative ledger of the twisted divergence solve (n = 3 exponents).

use crate::error::{EstimatesError, Result};
use crate::norms::lp_norm_physical;
use crate::series::trapezoid;
use nssl_spectral::SpectralField;

/// `‖f‖_{L_r(0,T; X)}` from samples of the spatial norm `‖f(t)‖_X`,
/// trapezoidal in time. `r = ∞` takes the running sup.
pub fn time_lebesgue(samples: &[(f64, f64)], r: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    if r.is_infinite() {
        return samples.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    }
    let powered: Vec<(f64, f64)> = samples.iter().map(|&(t, v)| (t, v.powf(r))).collect();
    trapezoid(&powered).max(0.0).powf(1.0 / r)
}

/// Components of the sum-space value, reported alongside the total.
#[derive(Debug, Clone)]
pub struct SumSpaceValue {
    /// `‖a‖_{L_{2p/(2p−3)}(0,T; L_{2p/(p+2)})}`
    pub mixed_part: f64,
    /// `‖b‖_{L2(0,T; L2)}`
    pub l2l2_part: f64,
    pub total: f64,
}

/// Evaluate the sum-space norm on a caller-supplied decomposition `f = a + b`
/// (an upper bound for the infimum over all decompositions).
pub fn sumspace_norm(
    a_part: &[(f64, SpectralField)],
    b_part: &[(f64, SpectralField)],
    p: f64,
) -> Result<SumSpaceValue> {
    if !(p > 3.0 && p.is_finite()) {
        return Err(EstimatesError::ConfigRange(format!(
            "sum-space exponent p must exceed the dimension 3, got {p}"
        )));
    }
    let space_exp = 2.0 * p / (p + 2.0);
    let time_exp = 2.0 * p / (2.0 * p - 3.0);
    let a_samples: Vec<(f64, f64)> = a_part
        .iter()
        .map(|(t, f)| (*t, lp_norm_physical(&f.to_physical(), space_exp)))
        .collect();
    let b_samples: Vec<(f64, f64)> = b_part.iter().map(|(t, f)| (*t, f.l2_norm())).collect();
    let mixed_part = time_lebesgue(&a_samples, time_exp);
    let l2l2_part = time_lebesgue(&b_samples, 2.0);
    Ok(SumSpaceValue {
        mixed_part,
        l2l2_part,
        total: mixed_part + l2l2_part,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nssl_spectral::{Grid, PhysicalField};

    fn steady_samples(grid: &Grid, nt: usize, dt: f64) -> Vec<(f64, SpectralField)> {
        let f = PhysicalField::fill(grid, 1, |_, x| x[0].sin()).to_spectral();
        (0..=nt).map(|i| (i as f64 * dt, f.clone())).collect()
    }

    #[test]
    fn constant_in_time_mixed_norm_is_t_power() {
        let g = Grid::square_2pi(2, 16).unwrap();
        let p = 5.0;
        let samples = steady_samples(&g, 20, 0.05);
        let v = sumspace_norm(&samples, &[], p).unwrap();
        let space_exp = 2.0 * p / (p + 2.0);
        let time_exp = 2.0 * p / (2.0 * p - 3.0);
        let space = lp_norm_physical(&samples[0].1.to_physical(), space_exp);
        // T = 1.0; exponent (2p−3)/(2p) on T
        let expect = 1.0f64.powf(1.0 / time_exp) * space;
        assert!((v.mixed_part - expect).abs() < 1e-10 * expect);
        assert_eq!(v.l2l2_part, 0.0);
        assert!((v.total - v.mixed_part).abs() < 1e-14);
    }

    #[test]
    fn b_only_reduces_to_l2l2() {
        let g = Grid::square_2pi(2, 16).unwrap();
        let samples = steady_samples(&g, 16, 0.125);
        let v = sumspace_norm(&[], &samples, 4.0).unwrap();
        let space = samples[0].1.l2_norm();
        let expect = 2.0f64.sqrt() * space; // sqrt(T), T = 2
        assert!((v.l2l2_part - expect).abs() < 1e-10 * expect);
        assert_eq!(v.mixed_part, 0.0);
    }

    #[test]
    fn time_exponent_closed_form() {
        // constant value c over [0, T] in L_r: c·T^{1/r}
        let samples: Vec<(f64, f64)> = (0..=10).map(|i| (0.3 * i as f64, 2.0)).collect();
        let r = 2.5;
        let got = time_lebesgue(&samples, r);
        let expect = 2.0 * 3.0f64.powf(1.0 / r);
        assert!((got - expect).abs() < 1e-12);
    }
}
