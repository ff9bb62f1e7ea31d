//! The skew-normal full conditional of the latent field, and its exact Gibbs
//! sweep.
//!
//! Conditioning the latent field on everything else yields a density
//! proportional to a Gaussian kernel times a product of independent probit
//! factors, `φ_k(s; μ*, Σ*) · ∏_i Φ(g_i s_i)`. Since the probit product
//! factorizes over coordinates, each factor can be augmented with a positive
//! truncated-normal variable; alternating the two resulting blocks is a Gibbs
//! sweep whose stationary law is exactly this kernel.
//!
//! The spec is held in precision form throughout: `Σ*` arises in the sampler
//! as the inverse of a sum of precisions that is available directly, so the
//! moment form would cost an extra inversion and lose accuracy for nothing.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::gp::{factor_spd, SpdFactor};
use crate::normal::{inv_phi, log_phi, phi};

const LN_2PI: f64 = 1.837_877_066_409_345_4;

/// A skew-normal kernel `φ_k(s; μ*, Σ*) ∏ Φ(g_i s_i)`, stored as the
/// precision `Q = Σ*⁻¹`, the shift `b = Q μ*`, and the diagonal skew `g`.
pub struct SkewNormalSpec {
    precision: DMatrix<f64>,
    factor: SpdFactor,
    mu_star: DVector<f64>,
    skew: DVector<f64>,
    shift: DVector<f64>,
}

impl SkewNormalSpec {
    /// Build from the natural (precision) parameterization.
    pub fn from_precision(
        precision: DMatrix<f64>,
        shift: DVector<f64>,
        skew: DVector<f64>,
    ) -> Result<Self> {
        let k = precision.nrows();
        if precision.ncols() != k {
            return Err(Error::invalid("precision matrix must be square"));
        }
        if shift.len() != k {
            return Err(Error::LengthMismatch {
                what: "shift vector",
                got: shift.len(),
                expected: k,
            });
        }
        if skew.len() != k {
            return Err(Error::LengthMismatch {
                what: "skew diagonal",
                got: skew.len(),
                expected: k,
            });
        }
        let scale = precision.diagonal().amax().max(1.0);
        let factor = factor_spd(&precision, scale, "skew-normal precision")?;
        let mu_star = factor.solve(&shift);
        Ok(SkewNormalSpec {
            precision,
            factor,
            mu_star,
            skew,
            shift,
        })
    }

    /// Build from the moment parameterization (inverts `Σ*`; intended for
    /// tests and small oracles rather than the sampler's hot path).
    pub fn from_moments(
        mu_star: DVector<f64>,
        sigma_star: DMatrix<f64>,
        skew: DVector<f64>,
    ) -> Result<Self> {
        let k = sigma_star.nrows();
        if sigma_star.ncols() != k || mu_star.len() != k || skew.len() != k {
            return Err(Error::invalid("moment parameterization dimensions disagree"));
        }
        let scale = sigma_star.diagonal().amax().max(1.0);
        let cov_factor = factor_spd(&sigma_star, scale, "skew-normal covariance")?;
        let precision = cov_factor.inverse();
        let shift = &precision * &mu_star;
        let prec_scale = precision.diagonal().amax().max(1.0);
        let factor = factor_spd(&precision, prec_scale, "skew-normal precision")?;
        Ok(SkewNormalSpec {
            precision,
            factor,
            mu_star,
            skew,
            shift,
        })
    }

    pub fn dim(&self) -> usize {
        self.mu_star.len()
    }

    pub fn mu_star(&self) -> &DVector<f64> {
        &self.mu_star
    }

    pub fn skew(&self) -> &DVector<f64> {
        &self.skew
    }
}

/// Log of the kernel at `s`: the Gaussian log-density (constants included)
/// plus `Σ_i log Φ(g_i s_i)`.
pub fn sn_log_kernel(s: &DVector<f64>, spec: &SkewNormalSpec) -> f64 {
    let k = spec.dim();
    assert_eq!(s.len(), k, "state dimension must match the spec");
    let d = s - &spec.mu_star;
    let quad = d.dot(&(&spec.precision * &d));
    let log_gauss = 0.5 * spec.factor.log_det() - 0.5 * k as f64 * LN_2PI - 0.5 * quad;
    let log_probit: f64 = (0..k).map(|i| log_phi(spec.skew[i] * s[i])).sum();
    log_gauss + log_probit
}

/// One sweep of the two-block Gibbs update.
///
/// (a) draw `u_i ~ N(g_i s_i, 1)` truncated to `(0, ∞)` for every coordinate
/// with nonzero skew; (b) draw `s ~ N(m, V)` with `V = (Q + G'G)⁻¹` and
/// `m = V(b + G'u)`. With zero skew, step (b) collapses to an exact draw from
/// the Gaussian part.
pub fn sn_gibbs_step<R: Rng + ?Sized>(
    current: &DVector<f64>,
    spec: &SkewNormalSpec,
    rng: &mut R,
) -> Result<DVector<f64>> {
    let k = spec.dim();
    assert_eq!(current.len(), k, "state dimension must match the spec");

    let mut posterior_prec = spec.precision.clone();
    let mut b = spec.shift.clone();
    for i in 0..k {
        let g = spec.skew[i];
        if g != 0.0 {
            let u = truncated_normal_positive(g * current[i], rng);
            posterior_prec[(i, i)] += g * g;
            b[i] += g * u;
        }
    }
    let scale = posterior_prec.diagonal().amax().max(1.0);
    let factor = factor_spd(&posterior_prec, scale, "skew-normal Gibbs precision")?;
    let mean = factor.solve(&b);
    Ok(factor.sample_as_precision(&mean, rng))
}

/// Draw from `N(mean, 1)` truncated to `(0, ∞)`.
///
/// Inversion through the lower quantile tail handles means down to -6; beyond
/// that an exponential-proposal rejection sampler takes over, so the draw
/// terminates quickly however deep the truncation cuts.
pub fn truncated_normal_positive<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    let a = -mean; // lower bound on the standard scale
    if a <= 6.0 {
        let p_tail = phi(-a);
        loop {
            let u: f64 = rng.random();
            let t = -inv_phi(p_tail * (1.0 - u));
            let x = mean + t;
            if x > 0.0 {
                return x;
            }
        }
    } else {
        let alpha = 0.5 * (a + (a * a + 4.0).sqrt());
        loop {
            let e: f64 = Exp1.sample(rng);
            let x = a + e / alpha;
            let log_accept = -0.5 * (x - alpha) * (x - alpha);
            if rng.random::<f64>().ln() <= log_accept {
                return mean + x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use proptest::prelude::*;

    fn identity_spec(k: usize, skew: &[f64]) -> SkewNormalSpec {
        SkewNormalSpec::from_precision(
            DMatrix::identity(k, k),
            DVector::zeros(k),
            DVector::from_column_slice(skew),
        )
        .unwrap()
    }

    #[test]
    fn kernel_reduces_to_gaussian_when_unskewed() {
        let k = 3;
        let spec = identity_spec(k, &[0.0; 3]);
        let s = DVector::from_column_slice(&[0.3, -0.7, 1.1]);
        let log_gauss = -0.5 * k as f64 * LN_2PI - 0.5 * s.norm_squared();
        let expected = log_gauss + k as f64 * 0.5f64.ln();
        assert!((sn_log_kernel(&s, &spec) - expected).abs() < 1e-12);
    }

    #[test]
    fn kernel_univariate_value_at_origin() {
        let spec = identity_spec(1, &[1.0]);
        let got = sn_log_kernel(&DVector::from_element(1, 0.0), &spec);
        let expected = -0.5 * LN_2PI - std::f64::consts::LN_2;
        assert!((got - expected).abs() < 1e-12, "got {got}, expected {expected}");
    }

    #[test]
    fn kernel_invariant_under_simultaneous_sign_flip() {
        let mu = DVector::from_column_slice(&[0.4, -0.2]);
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.8]);
        let g = DVector::from_column_slice(&[1.5, -0.7]);
        let spec = SkewNormalSpec::from_moments(mu.clone(), sigma.clone(), g.clone()).unwrap();
        let flipped = SkewNormalSpec::from_moments(-mu, sigma, -g).unwrap();
        for s in [[0.1, 0.2], [-1.3, 0.8], [2.0, -2.0]] {
            let v = DVector::from_column_slice(&s);
            let a = sn_log_kernel(&v, &spec);
            let b = sn_log_kernel(&(-&v), &flipped);
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn kernel_decays_along_rays_when_unskewed() {
        let spec = identity_spec(2, &[0.0, 0.0]);
        for dir in [[1.0, 0.0], [0.6, -0.8], [-0.4, 0.9]] {
            let mut last = f64::INFINITY;
            for t in [0.0, 0.5, 1.0, 2.0, 4.0] {
                let s = DVector::from_column_slice(&[dir[0] * t, dir[1] * t]);
                let v = sn_log_kernel(&s, &spec);
                assert!(v < last || t == 0.0, "kernel not decreasing at t = {t}");
                last = v;
            }
        }
    }

    #[test]
    fn gibbs_without_skew_is_exact_gaussian() {
        let mu = DVector::from_column_slice(&[1.2, -0.5]);
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, 2.0]);
        let spec =
            SkewNormalSpec::from_moments(mu.clone(), sigma.clone(), DVector::zeros(2)).unwrap();
        let mut rng = derive_rng(11, "skew-gauss", 0);
        let mut s = DVector::zeros(2);
        let n = 10_000;
        let mut sums = [0.0f64; 2];
        for _ in 0..n {
            s = sn_gibbs_step(&s, &spec, &mut rng).unwrap();
            sums[0] += s[0];
            sums[1] += s[1];
        }
        // with zero skew the sweeps are i.i.d. N(μ*, Σ*)
        for i in 0..2 {
            let se = (sigma[(i, i)] / n as f64).sqrt();
            let mean = sums[i] / n as f64;
            assert!((mean - mu[i]).abs() < 3.0 * se, "coordinate {i}: {mean} vs {}", mu[i]);
        }
    }

    /// Batch-means standard error for a correlated scalar chain.
    fn batch_se(xs: &[f64]) -> f64 {
        let b = 100;
        let m = xs.len() / b;
        let means: Vec<f64> = (0..b)
            .map(|i| xs[i * m..(i + 1) * m].iter().sum::<f64>() / m as f64)
            .collect();
        let grand = means.iter().sum::<f64>() / b as f64;
        let var = means.iter().map(|x| (x - grand).powi(2)).sum::<f64>() / (b - 1) as f64;
        (var / b as f64).sqrt()
    }

    #[test]
    fn gibbs_univariate_skew_normal_mean() {
        // standard SN(0, 1, g) has mean δ√(2/π) with δ = g/√(1+g²)
        for g in [1.0, 2.0] {
            let spec = identity_spec(1, &[g]);
            let mut rng = derive_rng(12, "skew-mean", g as u64);
            let mut s = DVector::zeros(1);
            let sweeps = 40_000;
            let mut kept = Vec::with_capacity(sweeps);
            for _ in 0..sweeps {
                s = sn_gibbs_step(&s, &spec, &mut rng).unwrap();
                kept.push(s[0]);
            }
            let mean = kept.iter().sum::<f64>() / kept.len() as f64;
            let expected = g / (1.0 + g * g).sqrt() * (2.0 / std::f64::consts::PI).sqrt();
            let se = batch_se(&kept);
            assert!(
                (mean - expected).abs() < 3.0 * se,
                "g = {g}: mean {mean}, expected {expected}, se {se}"
            );
        }
    }

    #[test]
    fn gibbs_respects_sign_symmetry() {
        let spec = identity_spec(2, &[1.0, -1.0]);
        let mut rng = derive_rng(13, "skew-sign", 0);
        let mut s = DVector::zeros(2);
        let sweeps = 40_000;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for _ in 0..sweeps {
            s = sn_gibbs_step(&s, &spec, &mut rng).unwrap();
            xs.push(s[0]);
            ys.push(s[1]);
        }
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        assert!(mx > 0.0 && my < 0.0, "means {mx}, {my}");
        let se = batch_se(&xs) + batch_se(&ys);
        assert!((mx + my).abs() < 3.0 * se, "asymmetry {mx} vs {my}");
    }

    #[test]
    fn gibbs_matches_quadrature_univariate() {
        // μ* = 0.3, Σ* = 0.8, g = 1.5 — empirical CDF of thinned sweeps
        // against grid quadrature of the kernel
        let spec = SkewNormalSpec::from_moments(
            DVector::from_element(1, 0.3),
            DMatrix::from_element(1, 1, 0.8),
            DVector::from_element(1, 1.5),
        )
        .unwrap();

        let lo = -4.0;
        let hi = 4.5;
        let m = 400;
        let step = (hi - lo) / m as f64;
        let grid: Vec<f64> = (0..m).map(|i| lo + (i as f64 + 0.5) * step).collect();
        let weights: Vec<f64> = grid
            .iter()
            .map(|&x| sn_log_kernel(&DVector::from_element(1, x), &spec).exp())
            .collect();
        let total: f64 = weights.iter().sum();
        let quad_cdf: Vec<f64> = weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc / total)
            })
            .collect();

        let mut rng = derive_rng(14, "skew-quad", 0);
        let mut s = DVector::zeros(1);
        let mut draws = Vec::new();
        for i in 0..200_000 {
            s = sn_gibbs_step(&s, &spec, &mut rng).unwrap();
            if i % 2 == 0 {
                draws.push(s[0]);
            }
        }
        draws.sort_by(f64::total_cmp);

        let mut max_dev: f64 = 0.0;
        for (i, &x) in grid.iter().enumerate() {
            let emp = draws.partition_point(|&d| d <= x) as f64 / draws.len() as f64;
            max_dev = max_dev.max((emp - quad_cdf[i]).abs());
        }
        assert!(max_dev < 0.02, "Kolmogorov distance {max_dev}");
    }

    #[test]
    fn truncated_sampler_deep_tail_terminates() {
        let mut rng = derive_rng(15, "trunc-deep", 0);
        for _ in 0..10_000 {
            let x = truncated_normal_positive(-10.0, &mut rng);
            assert!(x > 0.0);
            // essentially pinned to the boundary layer
            assert!(x < 1.0, "improbably large tail draw {x}");
        }
    }

    #[test]
    fn truncated_sampler_matches_analytic_cdf() {
        use statrs::distribution::{ContinuousCDF, Normal};
        let mean = -2.0;
        let mut rng = derive_rng(16, "trunc-ks", 0);
        let n = 20_000;
        let mut draws: Vec<f64> = (0..n)
            .map(|_| truncated_normal_positive(mean, &mut rng))
            .collect();
        draws.sort_by(f64::total_cmp);
        let norm = Normal::new(mean, 1.0).unwrap();
        let tail = 1.0 - norm.cdf(0.0);
        let mut max_dev: f64 = 0.0;
        for (i, &x) in draws.iter().enumerate() {
            let f = (norm.cdf(x) - norm.cdf(0.0)) / tail;
            let emp = (i + 1) as f64 / n as f64;
            max_dev = max_dev.max((f - emp).abs());
        }
        // KS critical value at the 1% level
        assert!(max_dev < 1.63 / (n as f64).sqrt(), "KS distance {max_dev}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn truncated_sampler_always_positive(mean in -12.0f64..8.0, seed in 0u64..1_000) {
            let mut rng = derive_rng(seed, "trunc-prop", 0);
            for _ in 0..50 {
                prop_assert!(truncated_normal_positive(mean, &mut rng) > 0.0);
            }
        }
    }
}
