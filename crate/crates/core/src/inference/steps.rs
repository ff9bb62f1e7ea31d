//! The individual full-conditional draws and MH acceptance ratios of the
//! samplers.
//!
//! Each function is pure given its inputs and a random stream, which is what
//! lets the distributional tests below pin every block against an analytic
//! law or a quadrature oracle at frozen state.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Gamma as GammaDist, StandardNormal};

use crate::error::{is_positive, Error, Result};
use crate::gp::factor_spd;
use crate::normal::log_phi;
use crate::skew::SkewNormalSpec;

use super::priors::{GammaPrior, InvGammaPrior, NormalPrior, Priors};

const TRUNCATION_ATTEMPTS: usize = 10_000;

/// Draw the envelope intensity from its conjugate `Gamma(a + k, b + |B|)`
/// full conditional, rejection-resampled into `(0, bound]` when a truncation
/// bound is set.
pub fn step_lambda_star<R: Rng + ?Sized>(
    k: usize,
    prior: &GammaPrior,
    truncation: Option<f64>,
    area: f64,
    rng: &mut R,
) -> Result<f64> {
    let shape = prior.shape + k as f64;
    let scale = 1.0 / (prior.rate + area);
    let gamma = GammaDist::new(shape, scale)
        .map_err(|e| Error::invalid(format!("lambda_star full conditional: {e}")))?;
    for _ in 0..TRUNCATION_ATTEMPTS {
        let draw = gamma.sample(rng);
        if !is_positive(draw) {
            continue; // tiny shapes can underflow to zero; redraw
        }
        match truncation {
            Some(bound) if draw > bound => continue,
            _ => return Ok(draw),
        }
    }
    Err(Error::TruncationExhausted(TRUNCATION_ATTEMPTS))
}

/// Mean and covariance of the conjugate Gaussian full conditional of the
/// regression coefficients.
pub fn eta_full_conditional(
    y: &DVector<f64>,
    design: &DMatrix<f64>,
    s_n: &DVector<f64>,
    tau2: f64,
    priors: &Priors,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let q = design.ncols();
    let resid = y - s_n;
    let mut precision = design.tr_mul(design) / tau2;
    for i in 0..q {
        precision[(i, i)] += 1.0 / priors.eta_var;
    }
    let shift = design.tr_mul(&resid) / tau2 + &priors.eta_mean / priors.eta_var;
    let factor = factor_spd(&precision, precision.diagonal().amax(), "eta precision")?;
    let mean = factor.solve(&shift);
    let cov = factor.inverse();
    Ok((mean, cov))
}

/// Draw `(η, τ²)`: η from its Gaussian conditional, then τ² from
/// `IG(n/2 + a, Σ(y - S - Dη)²/2 + b)` given the fresh η.
pub fn step_eta_tau2<R: Rng + ?Sized>(
    y: &DVector<f64>,
    design: &DMatrix<f64>,
    s_n: &DVector<f64>,
    tau2: f64,
    priors: &Priors,
    rng: &mut R,
) -> Result<(DVector<f64>, f64)> {
    let q = design.ncols();
    let resid = y - s_n;
    let mut precision = design.tr_mul(design) / tau2;
    for i in 0..q {
        precision[(i, i)] += 1.0 / priors.eta_var;
    }
    let shift = design.tr_mul(&resid) / tau2 + &priors.eta_mean / priors.eta_var;
    let factor = factor_spd(&precision, precision.diagonal().amax(), "eta precision")?;
    let mean = factor.solve(&shift);
    let eta = factor.sample_as_precision(&mean, rng);

    let ssr = (&resid - design * &eta).norm_squared();
    let tau2_new = draw_inverse_gamma(
        y.len() as f64 / 2.0 + priors.tau2.shape,
        ssr / 2.0 + priors.tau2.rate,
        rng,
    )?;
    Ok((eta, tau2_new))
}

/// `X ~ IG(shape, rate)` via the reciprocal of a gamma draw.
pub fn draw_inverse_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    let gamma = GammaDist::new(shape, 1.0 / rate)
        .map_err(|e| Error::invalid(format!("inverse-gamma draw: {e}")))?;
    for _ in 0..TRUNCATION_ATTEMPTS {
        let g = gamma.sample(rng);
        let x = 1.0 / g;
        if x.is_finite() && x > 0.0 {
            return Ok(x);
        }
    }
    Err(Error::invalid(format!(
        "inverse-gamma draw kept degenerating (shape {shape}, rate {rate})"
    )))
}

/// Assemble the latent-field full conditional.
///
/// The Gaussian part has precision `Q = C'Σ_y⁻¹C + (σ²R)⁻¹` — diagonal
/// `1/τ²` over the first `n` slots plus the scaled inverse correlation — and
/// shift `C'Σ_y⁻¹(y - Dη)`; the probit skew is `+β/σ` on the data block and
/// `-β/σ` on the discarded block.
#[allow(clippy::too_many_arguments)]
pub fn build_latent_spec(
    y: &DVector<f64>,
    design: &DMatrix<f64>,
    eta: &DVector<f64>,
    tau2: f64,
    sigma2: f64,
    beta: f64,
    corr_inv: &DMatrix<f64>,
    n: usize,
) -> Result<SkewNormalSpec> {
    let k = corr_inv.nrows();
    debug_assert!(n <= k);
    let mut precision = corr_inv / sigma2;
    let mut shift = DVector::zeros(k);
    let data_resid = y - design * eta;
    for i in 0..n {
        precision[(i, i)] += 1.0 / tau2;
        shift[i] = data_resid[i] / tau2;
    }
    let sigma = sigma2.sqrt();
    let skew = DVector::from_fn(k, |i, _| if i < n { beta / sigma } else { -beta / sigma });
    SkewNormalSpec::from_precision(precision, shift, skew)
}

/// `Σ log Φ` of the probit selection terms: `+β/σ` over the data block,
/// `-β/σ` over the discarded block.
pub fn log_phi_terms(s_k: &DVector<f64>, n: usize, beta: f64, sigma: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..s_k.len() {
        let sign = if i < n { 1.0 } else { -1.0 };
        total += log_phi(sign * beta * s_k[i] / sigma);
    }
    total
}

/// Log MH ratio for the variance under a lognormal random walk. The exponent
/// `-k/2 - a` already absorbs the proposal's Jacobian: the target kernel has
/// `(σ²)^{-k/2-a-1}` and the lognormal proposal contributes one positive
/// power of the ratio.
pub fn log_ratio_sigma2(
    sigma2_p: f64,
    sigma2_c: f64,
    s_k: &DVector<f64>,
    n: usize,
    quad: f64,
    beta: f64,
    prior: &InvGammaPrior,
) -> f64 {
    let k = s_k.len() as f64;
    let probit = log_phi_terms(s_k, n, beta, sigma2_p.sqrt())
        - log_phi_terms(s_k, n, beta, sigma2_c.sqrt());
    probit + (-k / 2.0 - prior.shape) * (sigma2_p.ln() - sigma2_c.ln())
        - (quad / 2.0 + prior.rate) * (1.0 / sigma2_p - 1.0 / sigma2_c)
}

/// Log MH ratio for the correlation range under a lognormal random walk,
/// given the log-determinants and quadratic forms `S'R(φ)⁻¹S` at both the
/// proposed and current range. The `a` exponent (not `a - 1`) absorbs the
/// proposal's Jacobian.
#[allow(clippy::too_many_arguments)]
pub fn log_ratio_phi(
    phi_p: f64,
    phi_c: f64,
    log_det_p: f64,
    log_det_c: f64,
    quad_p: f64,
    quad_c: f64,
    sigma2: f64,
    prior: &GammaPrior,
) -> f64 {
    -0.5 * (log_det_p - log_det_c) + prior.shape * (phi_p.ln() - phi_c.ln())
        - (quad_p - quad_c) / (2.0 * sigma2)
        - prior.rate * (phi_p - phi_c)
}

/// Log MH ratio for the preferentiality parameter under a Gaussian random
/// walk: probit selection terms times the normal prior ratio.
pub fn log_ratio_beta(
    beta_p: f64,
    beta_c: f64,
    s_k: &DVector<f64>,
    n: usize,
    sigma: f64,
    prior: &NormalPrior,
) -> f64 {
    let probit = log_phi_terms(s_k, n, beta_p, sigma) - log_phi_terms(s_k, n, beta_c, sigma);
    let prior_part = -((beta_p - prior.mean).powi(2) - (beta_c - prior.mean).powi(2))
        / (2.0 * prior.var);
    probit + prior_part
}

/// Bookkeeping for one MH block: proposal scale plus acceptance counters.
#[derive(Debug, Clone, Copy)]
pub struct MhBlock {
    pub scale: f64,
    pub accepted: u64,
    pub proposed: u64,
}

impl MhBlock {
    pub fn new(scale: f64) -> Self {
        MhBlock {
            scale,
            accepted: 0,
            proposed: 0,
        }
    }

    /// Accept/reject from a log ratio; returns whether the move was taken.
    pub fn decide<R: Rng + ?Sized>(&mut self, log_ratio: f64, rng: &mut R) -> bool {
        self.proposed += 1;
        let accept = log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio;
        if accept {
            self.accepted += 1;
        }
        accept
    }

    /// Robbins-Monro scale update toward a 0.44 acceptance rate.
    pub fn adapt(&mut self, log_ratio: f64, step_index: usize) {
        let alpha = log_ratio.min(0.0).exp();
        let gain = (step_index as f64 + 1.0).powf(-0.6);
        self.scale = (self.scale.ln() + gain * (alpha - 0.44)).exp().clamp(1e-3, 10.0);
    }

    pub fn rate(&self) -> Option<f64> {
        (self.proposed > 0).then(|| self.accepted as f64 / self.proposed as f64)
    }
}

/// Least-squares fit of `y` on the design, for chain initialization.
pub(crate) fn least_squares(y: &DVector<f64>, design: &DMatrix<f64>) -> DVector<f64> {
    design
        .clone()
        .svd(true, true)
        .solve(y, 1e-12)
        .unwrap_or_else(|_| DVector::zeros(design.ncols()))
}

/// One standard normal increment, exposed for the runners' proposals.
pub(crate) fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}
