//! Prior specifications and sampler settings.

use nalgebra::DVector;

use crate::error::{is_positive, Error, Result};

/// `Gamma(shape, rate)` with mean `shape/rate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPrior {
    pub shape: f64,
    pub rate: f64,
}

/// Inverse gamma with density `∝ x^{-shape-1} exp(-rate/x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvGammaPrior {
    pub shape: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalPrior {
    pub mean: f64,
    pub var: f64,
}

/// Priors for every block of the sampler.
///
/// The envelope intensity may carry an upper truncation bound, which caps the
/// mean number of points of the augmented process when a window would
/// otherwise let it wander.
#[derive(Debug, Clone, PartialEq)]
pub struct Priors {
    pub lambda_star: GammaPrior,
    pub lambda_star_max: Option<f64>,
    pub eta_mean: DVector<f64>,
    pub eta_var: f64,
    pub tau2: InvGammaPrior,
    pub sigma2: InvGammaPrior,
    pub phi: GammaPrior,
    pub beta: NormalPrior,
}

impl Priors {
    /// The conventional vague set for a model with `p` non-intercept
    /// covariates: `λ* ~ Gamma(0.001, 0.001)`, `η ~ N(0, 10⁶ I)`,
    /// `τ², σ² ~ IG(0.001, 0.001)`, `φ ~ Gamma(2, 4)`, `β ~ N(0, 1)`.
    ///
    /// The range prior is the vaguely informative kind that works in
    /// practice: mean on the right order of magnitude, large variance.
    pub fn vague(p: usize) -> Self {
        Priors {
            lambda_star: GammaPrior {
                shape: 0.001,
                rate: 0.001,
            },
            lambda_star_max: None,
            eta_mean: DVector::zeros(p + 1),
            eta_var: 1e6,
            tau2: InvGammaPrior {
                shape: 0.001,
                rate: 0.001,
            },
            sigma2: InvGammaPrior {
                shape: 0.001,
                rate: 0.001,
            },
            phi: GammaPrior { shape: 2.0, rate: 4.0 },
            beta: NormalPrior { mean: 0.0, var: 1.0 },
        }
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        let positive = [
            ("lambda_star.shape", self.lambda_star.shape),
            ("lambda_star.rate", self.lambda_star.rate),
            ("eta.var", self.eta_var),
            ("tau2.shape", self.tau2.shape),
            ("tau2.rate", self.tau2.rate),
            ("sigma2.shape", self.sigma2.shape),
            ("sigma2.rate", self.sigma2.rate),
            ("phi.shape", self.phi.shape),
            ("phi.rate", self.phi.rate),
            ("beta.var", self.beta.var),
        ];
        for (name, v) in positive {
            if !is_positive(v) {
                return Err(Error::invalid(format!("prior {name} must be positive, got {v}")));
            }
        }
        if let Some(max) = self.lambda_star_max {
            if !is_positive(max) {
                return Err(Error::invalid(format!(
                    "lambda_star truncation bound must be positive, got {max}"
                )));
            }
        }
        if self.eta_mean.len() != p + 1 {
            return Err(Error::LengthMismatch {
                what: "eta prior mean",
                got: self.eta_mean.len(),
                expected: p + 1,
            });
        }
        Ok(())
    }
}

impl Default for Priors {
    fn default() -> Self {
        Priors::vague(0)
    }
}

/// Chain length, retention, proposal scales, and reproducibility settings.
#[derive(Debug, Clone, PartialEq)]
pub struct McmcConfig {
    pub n_iter: usize,
    pub burn_in: usize,
    /// Keep every `thin`-th post-burn-in state, giving
    /// `⌊(n_iter - burn_in)/thin⌋` retained draws.
    pub thin: usize,
    pub seed: u64,
    /// Log-scale random-walk widths for the variance and range proposals,
    /// and the plain-scale width for the preferentiality proposal.
    pub scale_sigma2: f64,
    pub scale_phi: f64,
    pub scale_beta: f64,
    /// Skip the range update entirely and hold `φ` at this value.
    pub fix_phi: Option<f64>,
    /// Robbins-Monro tuning of the three proposal scales toward a 0.44
    /// acceptance rate, active during burn-in only so the kept chain's
    /// invariant law is untouched.
    pub adapt: bool,
    /// Also record the discarded-point locations and field values per draw.
    pub store_latent_full: bool,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            n_iter: 20_000,
            burn_in: 2_000,
            thin: 10,
            seed: 0,
            scale_sigma2: 0.3,
            scale_phi: 0.3,
            scale_beta: 0.3,
            fix_phi: None,
            adapt: true,
            store_latent_full: false,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.n_iter {
            return Err(Error::invalid(format!(
                "burn_in ({}) must be smaller than n_iter ({})",
                self.burn_in, self.n_iter
            )));
        }
        if self.thin == 0 {
            return Err(Error::invalid("thin must be at least 1"));
        }
        for (name, v) in [
            ("scale_sigma2", self.scale_sigma2),
            ("scale_phi", self.scale_phi),
            ("scale_beta", self.scale_beta),
        ] {
            if !is_positive(v) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(phi) = self.fix_phi {
            if !is_positive(phi) {
                return Err(Error::invalid(format!("fix_phi must be positive, got {phi}")));
            }
        }
        Ok(())
    }

    /// Number of draws the chain will retain.
    pub fn retained(&self) -> usize {
        (self.n_iter - self.burn_in) / self.thin
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vague_priors_validate() {
        Priors::vague(0).validate(0).unwrap();
        Priors::vague(3).validate(3).unwrap();
        assert!(Priors::vague(1).validate(2).is_err());
    }

    #[test]
    fn config_validation() {
        let ok = McmcConfig::default();
        ok.validate().unwrap();
        let c = McmcConfig { burn_in: ok.n_iter, ..Default::default() };
        assert!(c.validate().is_err());
        let c = McmcConfig { thin: 0, ..Default::default() };
        assert!(c.validate().is_err());
        let c = McmcConfig { fix_phi: Some(-1.0), ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn retained_count_uses_floor() {
        let c = McmcConfig {
            n_iter: 200_000,
            burn_in: 20_000,
            thin: 60,
            ..Default::default()
        };
        assert_eq!(c.retained(), 3_000);
    }
}
