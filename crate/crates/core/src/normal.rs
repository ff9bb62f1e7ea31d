//! Standard-normal helpers used across the samplers.
//!
//! The MH acceptance ratios multiply hundreds of probit terms, so `log Φ` has
//! to stay finite far into the lower tail where `erfc` underflows.

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Standard normal CDF Φ(x).
pub fn phi(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Log standard normal density.
pub fn log_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Log standard normal CDF, finite for all finite `x`.
///
/// Below `x = -10` the direct route is replaced by the continued-fraction
/// style tail expansion `Φ(x) ≈ φ(x)/|x| · (1 - 1/x² + 3/x⁴ - ...)`, which
/// keeps the result accurate long after `erfc` has underflowed to zero.
pub fn log_phi(x: f64) -> f64 {
    if x >= 0.0 {
        // ln(1 - Φ(-x)) without cancellation
        (-0.5 * erfc(x * FRAC_1_SQRT_2)).ln_1p()
    } else if x > -10.0 {
        (0.5 * erfc(-x * FRAC_1_SQRT_2)).ln()
    } else {
        let inv_x2 = 1.0 / (x * x);
        let series = 1.0
            + inv_x2
                * (-1.0 + inv_x2 * (3.0 + inv_x2 * (-15.0 + inv_x2 * (105.0 - inv_x2 * 945.0))));
        log_pdf(x) - (-x).ln() + series.ln()
    }
}

/// Standard normal quantile Φ⁻¹(p).
pub fn inv_phi(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::ContinuousCDF;

    #[test]
    fn cdf_matches_reference() {
        let reference = statrs::distribution::Normal::standard();
        for x in [-8.0, -3.0, -1.0, 0.0, 0.5, 2.0, 6.0] {
            assert!((phi(x) - reference.cdf(x)).abs() < 1e-14, "x = {x}");
        }
        assert!((phi(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn log_cdf_continuous_across_tail_switch() {
        // direct and asymptotic branches must agree near the seam
        let a = log_phi(-9.999_999);
        let b = log_phi(-10.000_001);
        assert!((a - b).abs() < 1e-5 * a.abs(), "seam mismatch: {a} vs {b}");
    }

    #[test]
    fn log_cdf_finite_deep_in_tail() {
        for x in [-20.0, -50.0, -200.0, -1e3] {
            let v = log_phi(x);
            assert!(v.is_finite(), "log_phi({x}) = {v}");
            // dominated by -x²/2
            assert!((v - (-0.5 * x * x)).abs() / (0.5 * x * x) < 0.05);
        }
    }

    #[test]
    fn log_cdf_upper_branch() {
        assert!((log_phi(0.0) - 0.5f64.ln()).abs() < 1e-15);
        assert!(log_phi(10.0).abs() < 1e-15);
        assert!((log_phi(1.0) - phi(1.0).ln()).abs() < 1e-14);
    }
}
