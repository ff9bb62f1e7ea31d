//! Stationary Gaussian-process machinery: correlation functions, covariance
//! assembly, prior simulation, and conditional (kriging) distributions.
//!
//! Everything here is a pure function of its inputs plus an explicit random
//! stream, so callers own concurrency and reproducibility.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{is_positive, Error, Result};
use crate::region::Point;

/// Isotropic correlation families. A single member today; the sampler and the
/// kriging code take the model by value so further families stay additive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrelationFamily {
    Exponential,
}

/// An isotropic correlation function `ρ_φ(h)` with range parameter `φ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationModel {
    family: CorrelationFamily,
    phi: f64,
}

impl CorrelationModel {
    /// `ρ(h) = exp(-h/φ)`; its practical range (correlation ≈ 0.05) is `3φ`.
    pub fn exponential(phi: f64) -> Result<Self> {
        if !is_positive(phi) {
            return Err(Error::invalid(format!("range parameter must be positive, got {phi}")));
        }
        Ok(CorrelationModel {
            family: CorrelationFamily::Exponential,
            phi,
        })
    }

    pub fn family(&self) -> CorrelationFamily {
        self.family
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Same family, different range. Used by the range-parameter MH step.
    pub fn with_phi(&self, phi: f64) -> Result<Self> {
        match self.family {
            CorrelationFamily::Exponential => CorrelationModel::exponential(phi),
        }
    }

    /// Evaluate `ρ(h)` at a nonnegative distance.
    pub fn correlation(&self, h: f64) -> Result<f64> {
        if h < 0.0 || !h.is_finite() {
            return Err(Error::invalid(format!("distance must be nonnegative, got {h}")));
        }
        Ok(self.correlation_unchecked(h))
    }

    #[inline]
    fn correlation_unchecked(&self, h: f64) -> f64 {
        match self.family {
            CorrelationFamily::Exponential => (-h / self.phi).exp(),
        }
    }
}

/// Marginal variance and correlation of a zero-mean stationary process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpParams {
    pub sigma2: f64,
    pub corr: CorrelationModel,
}

impl GpParams {
    pub fn new(sigma2: f64, corr: CorrelationModel) -> Result<Self> {
        if !is_positive(sigma2) {
            return Err(Error::invalid(format!("variance must be positive, got {sigma2}")));
        }
        Ok(GpParams { sigma2, corr })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

/// Correlation matrix `R[i][j] = ρ(|x_i - x_j|)`; symmetric with unit
/// diagonal by construction.
pub fn corr_matrix(locations: &[Point], model: &CorrelationModel) -> DMatrix<f64> {
    let n = locations.len();
    let mut r = DMatrix::identity(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = model.correlation_unchecked(locations[i].dist(&locations[j]));
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    r
}

/// Cross-correlation matrix between two location sets (`rows.len() × cols.len()`).
pub fn cross_corr_matrix(rows: &[Point], cols: &[Point], model: &CorrelationModel) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        model.correlation_unchecked(rows[i].dist(&cols[j]))
    })
}

/// An exact Gaussian conditional: mean vector and covariance over the targets.
#[derive(Debug, Clone)]
pub struct ConditionalGaussian {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

// Diagonal jitter ladder: first attempt is exact, then ε escalates ×10 up to
// 1e-4 (relative to the covariance scale) before the factorization gives up.
const JITTER_LADDER: [f64; 6] = [0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4];

/// A Cholesky factor obtained under the jitter policy.
pub(crate) struct SpdFactor {
    chol: Cholesky<f64, Dyn>,
}

impl SpdFactor {
    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    /// `log |A|`.
    pub fn log_det(&self) -> f64 {
        2.0 * self.chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    /// `A⁻¹ b`.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    /// `L⁻¹ B` where `A = L Lᵀ`.
    pub fn half_solve_mat(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol
            .l_dirty()
            .solve_lower_triangular(b)
            .expect("Cholesky factor has positive diagonal")
    }

    /// `v' A⁻¹ v`.
    pub fn quad_form(&self, v: &DVector<f64>) -> f64 {
        self.chol
            .l_dirty()
            .solve_lower_triangular(v)
            .expect("Cholesky factor has positive diagonal")
            .norm_squared()
    }

    /// Dense `A⁻¹`.
    pub fn inverse(&self) -> DMatrix<f64> {
        self.chol.inverse()
    }

    /// Draw from `N(mean, A)` (treats the factored matrix as a covariance).
    pub fn sample_as_cov<R: Rng + ?Sized>(&self, mean: &DVector<f64>, rng: &mut R) -> DVector<f64> {
        let z = standard_normal_vector(self.dim(), rng);
        mean + self.chol.l() * z
    }

    /// Draw from `N(mean, A⁻¹)` (treats the factored matrix as a precision).
    pub fn sample_as_precision<R: Rng + ?Sized>(
        &self,
        mean: &DVector<f64>,
        rng: &mut R,
    ) -> DVector<f64> {
        let z = standard_normal_vector(self.dim(), rng);
        let w = self
            .chol
            .l_dirty()
            .tr_solve_lower_triangular(&z)
            .expect("Cholesky factor has positive diagonal");
        mean + w
    }
}

pub(crate) fn standard_normal_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Factor a symmetric positive (semi-)definite matrix, escalating diagonal
/// jitter `ε·scale` through the ladder until the factorization succeeds.
pub(crate) fn factor_spd(base: &DMatrix<f64>, scale: f64, context: &str) -> Result<SpdFactor> {
    if base.iter().any(|v| !v.is_finite()) {
        return Err(Error::IllConditioned {
            context: format!("{context}: non-finite matrix entries"),
        });
    }
    for &eps in &JITTER_LADDER {
        let mut m = base.clone();
        if eps > 0.0 {
            let bump = eps * scale;
            for i in 0..m.nrows() {
                m[(i, i)] += bump;
            }
        }
        if let Some(chol) = Cholesky::new(m) {
            return Ok(SpdFactor { chol });
        }
    }
    Err(Error::IllConditioned {
        context: context.to_string(),
    })
}

/// Draw `S ~ N(0, σ²R)` jointly at the given locations.
pub fn gp_draw<R: Rng + ?Sized>(
    locations: &[Point],
    params: &GpParams,
    rng: &mut R,
) -> Result<DVector<f64>> {
    if locations.is_empty() {
        return Err(Error::invalid("gp_draw needs at least one location"));
    }
    let cov = corr_matrix(locations, &params.corr) * params.sigma2;
    let factor = factor_spd(&cov, params.sigma2, "gp_draw covariance")?;
    Ok(factor.sample_as_cov(&DVector::zeros(locations.len()), rng))
}

/// Exact conditional of the joint `N(0, σ²R)` over `targets ∪ known_locs`,
/// given the field values at `known_locs`.
///
/// Mean `R₁₂R₂₂⁻¹S` and covariance `σ²(R₁₁ - R₁₂R₂₂⁻¹R₂₁)`.
pub fn conditional(
    targets: &[Point],
    known_locs: &[Point],
    known_s: &[f64],
    params: &GpParams,
) -> Result<ConditionalGaussian> {
    if known_locs.is_empty() {
        return Err(Error::invalid("conditional requires at least one known location"));
    }
    if known_s.len() != known_locs.len() {
        return Err(Error::LengthMismatch {
            what: "known field values",
            got: known_s.len(),
            expected: known_locs.len(),
        });
    }
    let t = targets.len();
    if t == 0 {
        return Ok(ConditionalGaussian {
            mean: DVector::zeros(0),
            cov: DMatrix::zeros(0, 0),
        });
    }

    let r22 = corr_matrix(known_locs, &params.corr);
    let factor = factor_spd(&r22, 1.0, "conditional: known-location correlation")?;
    let r21 = cross_corr_matrix(known_locs, targets, &params.corr); // knowns × targets
    let s = DVector::from_column_slice(known_s);

    let mean = r21.transpose() * factor.solve(&s);
    // σ²(R₁₁ - XᵀX) with X = L⁻¹R₂₁
    let x = factor.half_solve_mat(&r21);
    let mut cov = corr_matrix(targets, &params.corr);
    cov.gemm_tr(-1.0, &x, &x, 1.0);
    cov *= params.sigma2;

    Ok(ConditionalGaussian { mean, cov })
}

/// Retrospective extension of the field: one draw from [`conditional`].
pub fn conditional_draw<R: Rng + ?Sized>(
    targets: &[Point],
    known_locs: &[Point],
    known_s: &[f64],
    params: &GpParams,
    rng: &mut R,
) -> Result<DVector<f64>> {
    let cond = conditional(targets, known_locs, known_s, params)?;
    if targets.is_empty() {
        return Ok(cond.mean);
    }
    let factor = factor_spd(&cond.cov, params.sigma2, "conditional_draw covariance")?;
    Ok(factor.sample_as_cov(&cond.mean, rng))
}

/// Per-target conditional mean and variance, skipping the joint covariance.
///
/// Prediction grids can hold thousands of points; their summaries only need
/// the marginal law at each point, which costs `O(k²)` per target instead of
/// the `O(n_u³)` joint factorization.
pub fn conditional_marginals(
    targets: &[Point],
    known_locs: &[Point],
    known_s: &[f64],
    params: &GpParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if known_locs.is_empty() {
        return Err(Error::invalid("conditional requires at least one known location"));
    }
    if known_s.len() != known_locs.len() {
        return Err(Error::LengthMismatch {
            what: "known field values",
            got: known_s.len(),
            expected: known_locs.len(),
        });
    }
    let r22 = corr_matrix(known_locs, &params.corr);
    let factor = factor_spd(&r22, 1.0, "conditional_marginals: known-location correlation")?;
    let alpha = factor.solve(&DVector::from_column_slice(known_s));
    let r21 = cross_corr_matrix(known_locs, targets, &params.corr);
    let x = factor.half_solve_mat(&r21);

    let mut means = Vec::with_capacity(targets.len());
    let mut vars = Vec::with_capacity(targets.len());
    for j in 0..targets.len() {
        let col = r21.column(j);
        means.push(col.dot(&alpha));
        let reduction = x.column(j).norm_squared();
        vars.push((params.sigma2 * (1.0 - reduction)).max(0.0));
    }
    Ok((means, vars))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use proptest::prelude::*;

    fn exp_model(phi: f64) -> CorrelationModel {
        CorrelationModel::exponential(phi).unwrap()
    }

    #[test]
    fn correlation_values() {
        let m = exp_model(0.15);
        assert_eq!(m.correlation(0.0).unwrap(), 1.0);
        assert!((m.correlation(0.15).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((m.correlation(3.0 * 0.15).unwrap() - (-3.0f64).exp()).abs() < 1e-15);
        assert!(m.correlation(-0.1).is_err());
        assert!(CorrelationModel::exponential(0.0).is_err());
    }

    #[test]
    fn corr_matrix_structure() {
        let m = exp_model(0.5);
        let single = corr_matrix(&[Point::new(0.3, 0.7)], &m);
        assert_eq!(single.nrows(), 1);
        assert_eq!(single[(0, 0)], 1.0);

        let pair = corr_matrix(&[Point::new(0.0, 0.0), Point::new(0.5, 0.0)], &m);
        assert!((pair[(0, 1)] - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(pair[(0, 1)], pair[(1, 0)]);
    }

    #[test]
    fn gp_draw_marginal_variance() {
        let params = GpParams::new(3.0, exp_model(0.15)).unwrap();
        let loc = [Point::new(0.5, 0.5)];
        let mut rng = derive_rng(3, "gp-var", 0);
        let n = 10_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| gp_draw(&loc, &params, &mut rng).unwrap()[0])
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var - 3.0).abs() / 3.0 < 0.05, "sample variance {var}");
    }

    #[test]
    fn gp_draw_near_coincident_points() {
        let params = GpParams::new(1.0, exp_model(0.2)).unwrap();
        let locs = [Point::new(0.5, 0.5), Point::new(0.5, 0.5 + 1e-13)];
        let mut rng = derive_rng(4, "gp-coincident", 0);
        let n = 10_000;
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let d = gp_draw(&locs, &params, &mut rng).unwrap();
            sx += d[0];
            sy += d[1];
            sxx += d[0] * d[0];
            syy += d[1] * d[1];
            sxy += d[0] * d[1];
        }
        let nf = n as f64;
        let cov = sxy / nf - (sx / nf) * (sy / nf);
        let vx = sxx / nf - (sx / nf).powi(2);
        let vy = syy / nf - (sy / nf).powi(2);
        let corr = cov / (vx * vy).sqrt();
        assert!(corr >= 0.99, "correlation {corr}");
    }

    #[test]
    fn gp_draw_degenerate_variance() {
        let params = GpParams::new(1e-12, exp_model(0.15)).unwrap();
        let locs: Vec<Point> = (0..20)
            .map(|i| Point::new((i % 5) as f64 / 5.0, (i / 5) as f64 / 4.0))
            .collect();
        let mut rng = derive_rng(5, "gp-degenerate", 0);
        let d = gp_draw(&locs, &params, &mut rng).unwrap();
        assert!(d.amax() < 1e-4, "max |S| = {}", d.amax());
    }

    #[test]
    fn conditional_two_point_closed_form() {
        // one known, one target at distance h:
        // mean = ρ(h)·S_known, variance = σ²(1 - ρ(h)²)
        let sigma2 = 2.5;
        let phi = 0.4;
        let params = GpParams::new(sigma2, exp_model(phi)).unwrap();
        let s_known = 1.3;
        for h in [0.05, 0.2, 0.7, 1.5] {
            let cond = conditional(
                &[Point::new(h, 0.0)],
                &[Point::new(0.0, 0.0)],
                &[s_known],
                &params,
            )
            .unwrap();
            let rho = (-h / phi).exp();
            assert!((cond.mean[0] - rho * s_known).abs() < 1e-10);
            assert!((cond.cov[(0, 0)] - sigma2 * (1.0 - rho * rho)).abs() < 1e-10);
        }
    }

    #[test]
    fn conditional_interpolates_known_points() {
        let params = GpParams::new(3.0, exp_model(0.15)).unwrap();
        let knowns = vec![
            Point::new(0.1, 0.2),
            Point::new(0.8, 0.3),
            Point::new(0.4, 0.9),
        ];
        let s = [0.5, -1.2, 2.0];
        let cond = conditional(&knowns, &knowns, &s, &params).unwrap();
        for (i, &want) in s.iter().enumerate() {
            assert!((cond.mean[i] - want).abs() < 1e-6);
        }
        assert!(cond.cov.amax() <= 1e-6 * params.sigma2);
    }

    #[test]
    fn conditional_decorrelation_limit() {
        let params = GpParams::new(3.0, exp_model(0.15)).unwrap();
        let cond = conditional(
            &[Point::new(1000.0 * 0.15 + 0.1, 0.0)],
            &[Point::new(0.0, 0.0), Point::new(0.05, 0.0)],
            &[2.0, 1.5],
            &params,
        )
        .unwrap();
        assert!(cond.mean[0].abs() < 1e-3);
        assert!((cond.cov[(0, 0)] - 3.0).abs() < 1e-3);
    }

    #[test]
    fn conditional_marginalization_consistency() {
        // the A-marginal of the joint conditional over A ∪ B equals the
        // conditional over A alone
        let params = GpParams::new(1.7, exp_model(0.3)).unwrap();
        let knowns = vec![Point::new(0.2, 0.1), Point::new(0.6, 0.8), Point::new(0.9, 0.4)];
        let s = [0.3, -0.8, 1.1];
        let a = vec![Point::new(0.5, 0.5), Point::new(0.3, 0.7)];
        let b = vec![Point::new(0.1, 0.9)];
        let mut ab = a.clone();
        ab.extend_from_slice(&b);

        let joint = conditional(&ab, &knowns, &s, &params).unwrap();
        let only_a = conditional(&a, &knowns, &s, &params).unwrap();
        for i in 0..a.len() {
            assert!((joint.mean[i] - only_a.mean[i]).abs() < 1e-8);
            for j in 0..a.len() {
                assert!((joint.cov[(i, j)] - only_a.cov[(i, j)]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn conditional_marginals_match_joint() {
        let params = GpParams::new(2.0, exp_model(0.25)).unwrap();
        let knowns = vec![Point::new(0.2, 0.1), Point::new(0.6, 0.8), Point::new(0.9, 0.4)];
        let s = [0.3, -0.8, 1.1];
        let targets = vec![Point::new(0.5, 0.5), Point::new(0.05, 0.95)];
        let joint = conditional(&targets, &knowns, &s, &params).unwrap();
        let (means, vars) = conditional_marginals(&targets, &knowns, &s, &params).unwrap();
        for j in 0..targets.len() {
            assert!((means[j] - joint.mean[j]).abs() < 1e-10);
            assert!((vars[j] - joint.cov[(j, j)]).abs() < 1e-10);
        }
    }

    #[test]
    fn conditional_draw_edges_and_moments() {
        let params = GpParams::new(3.0, exp_model(0.15)).unwrap();
        let knowns = [Point::new(0.1, 0.1), Point::new(0.9, 0.9)];
        let s = [1.0, -0.5];
        let mut rng = derive_rng(6, "gp-cond-draw", 0);

        let empty = conditional_draw(&[], &knowns, &s, &params, &mut rng).unwrap();
        assert_eq!(empty.len(), 0);

        let coincident =
            conditional_draw(&[Point::new(0.1, 0.1)], &knowns, &s, &params, &mut rng).unwrap();
        assert!((coincident[0] - 1.0).abs() < 1e-3);

        // empirical mean/cov of repeated draws against the analytic conditional
        let targets = [Point::new(0.4, 0.4), Point::new(0.6, 0.2)];
        let cond = conditional(&targets, &knowns, &s, &params).unwrap();
        let n = 10_000;
        let (mut m0, mut m1, mut c00, mut c11, mut c01) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let d = conditional_draw(&targets, &knowns, &s, &params, &mut rng).unwrap();
            m0 += d[0];
            m1 += d[1];
            c00 += d[0] * d[0];
            c11 += d[1] * d[1];
            c01 += d[0] * d[1];
        }
        let nf = n as f64;
        m0 /= nf;
        m1 /= nf;
        let v00 = c00 / nf - m0 * m0;
        let v11 = c11 / nf - m1 * m1;
        let v01 = c01 / nf - m0 * m1;
        let se0 = (cond.cov[(0, 0)] / nf).sqrt();
        let se1 = (cond.cov[(1, 1)] / nf).sqrt();
        assert!((m0 - cond.mean[0]).abs() < 3.0 * se0);
        assert!((m1 - cond.mean[1]).abs() < 3.0 * se1);
        // variance of a sample variance ≈ 2σ⁴/n
        assert!((v00 - cond.cov[(0, 0)]).abs() < 3.0 * (2.0 / nf).sqrt() * cond.cov[(0, 0)]);
        assert!((v11 - cond.cov[(1, 1)]).abs() < 3.0 * (2.0 / nf).sqrt() * cond.cov[(1, 1)]);
        assert!((v01 - cond.cov[(0, 1)]).abs() < 3.0 * (2.0 / nf).sqrt() * cond.cov[(0, 0)].max(cond.cov[(1, 1)]));
    }

    #[test]
    fn factorization_succeeds_for_large_uniform_sets() {
        let mut rng = derive_rng(7, "gp-500", 0);
        let region = crate::region::Region::unit_square();
        let locs = region.sample_uniform(500, &mut rng);
        let r = corr_matrix(&locs, &exp_model(0.15));
        assert!(factor_spd(&r, 1.0, "test").is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn corr_matrix_symmetric_and_factorizable(seed in 0u64..500, n in 1usize..40, phi in 0.05f64..2.0) {
            let mut rng = derive_rng(seed, "gp-prop", 0);
            let region = crate::region::Region::unit_square();
            let locs = region.sample_uniform(n, &mut rng);
            let r = corr_matrix(&locs, &exp_model(phi));
            for i in 0..n {
                prop_assert_eq!(r[(i, i)], 1.0);
                for j in 0..n {
                    prop_assert_eq!(r[(i, j)], r[(j, i)]);
                }
            }
            prop_assert!(factor_spd(&r, 1.0, "prop").is_ok());
        }
    }
}
