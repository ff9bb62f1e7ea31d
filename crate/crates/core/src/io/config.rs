//! Flat `key = value` fit configuration with dotted sections.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::inference::{McmcConfig, Priors};
use crate::region::Region;

use super::{parse_kv_lines, parse_number};

/// Everything a fit needs besides the data: priors, sampler settings, and
/// the study window.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSettings {
    pub priors: Priors,
    pub mcmc: McmcConfig,
    pub region: Region,
}

impl FitSettings {
    pub fn defaults(p: usize) -> Self {
        FitSettings {
            priors: Priors::vague(p),
            mcmc: McmcConfig::default(),
            region: Region::unit_square(),
        }
    }
}

/// Parse a config for a dataset with `p` non-intercept covariates. Missing
/// keys fall back to the defaults; unknown keys are errors.
pub fn parse_fit_config(text: &str, p: usize, path: &str) -> Result<FitSettings> {
    let mut s = FitSettings::defaults(p);
    let mut region_lower = s.region.lower();
    let mut region_upper = s.region.upper();

    for (key, value, line) in parse_kv_lines(text, path)? {
        let bad_bool = || Error::Parse {
            path: path.to_string(),
            line,
            msg: format!("expected true/false for `{key}`, got `{value}`"),
        };
        match key.as_str() {
            "region.lower" => region_lower = parse_pair(&value, &key, path, line)?,
            "region.upper" => region_upper = parse_pair(&value, &key, path, line)?,
            "mcmc.n_iter" => s.mcmc.n_iter = parse_number(&value, &key, path, line)?,
            "mcmc.burn_in" => s.mcmc.burn_in = parse_number(&value, &key, path, line)?,
            "mcmc.thin" => s.mcmc.thin = parse_number(&value, &key, path, line)?,
            "mcmc.seed" => s.mcmc.seed = parse_number(&value, &key, path, line)?,
            "mcmc.scale_sigma2" => s.mcmc.scale_sigma2 = parse_number(&value, &key, path, line)?,
            "mcmc.scale_phi" => s.mcmc.scale_phi = parse_number(&value, &key, path, line)?,
            "mcmc.scale_beta" => s.mcmc.scale_beta = parse_number(&value, &key, path, line)?,
            "mcmc.fix_phi" => s.mcmc.fix_phi = Some(parse_number(&value, &key, path, line)?),
            "mcmc.adapt" => s.mcmc.adapt = value.parse().map_err(|_| bad_bool())?,
            "mcmc.store_latent_full" => {
                s.mcmc.store_latent_full = value.parse().map_err(|_| bad_bool())?
            }
            "prior.lambda_star.shape" => {
                s.priors.lambda_star.shape = parse_number(&value, &key, path, line)?
            }
            "prior.lambda_star.rate" => {
                s.priors.lambda_star.rate = parse_number(&value, &key, path, line)?
            }
            "prior.lambda_star.max" => {
                s.priors.lambda_star_max = Some(parse_number(&value, &key, path, line)?)
            }
            "prior.eta.mean" => {
                s.priors.eta_mean = parse_eta_mean(&value, p, &key, path, line)?;
            }
            "prior.eta.var" => s.priors.eta_var = parse_number(&value, &key, path, line)?,
            "prior.tau2.shape" => s.priors.tau2.shape = parse_number(&value, &key, path, line)?,
            "prior.tau2.rate" => s.priors.tau2.rate = parse_number(&value, &key, path, line)?,
            "prior.sigma2.shape" => {
                s.priors.sigma2.shape = parse_number(&value, &key, path, line)?
            }
            "prior.sigma2.rate" => s.priors.sigma2.rate = parse_number(&value, &key, path, line)?,
            "prior.phi.shape" => s.priors.phi.shape = parse_number(&value, &key, path, line)?,
            "prior.phi.rate" => s.priors.phi.rate = parse_number(&value, &key, path, line)?,
            "prior.beta.mean" => s.priors.beta.mean = parse_number(&value, &key, path, line)?,
            "prior.beta.var" => s.priors.beta.var = parse_number(&value, &key, path, line)?,
            other => {
                return Err(Error::Parse {
                    path: path.to_string(),
                    line,
                    msg: format!("unknown config key `{other}`"),
                })
            }
        }
    }

    s.region = Region::new(region_lower, region_upper)
        .map_err(|e| Error::Config(format!("{path}: {e}")))?;
    s.mcmc.validate().map_err(|e| Error::Config(format!("{path}: {e}")))?;
    s.priors
        .validate(p)
        .map_err(|e| Error::Config(format!("{path}: {e}")))?;
    Ok(s)
}

fn parse_pair(value: &str, key: &str, path: &str, line: usize) -> Result<[f64; 2]> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::Parse {
            path: path.to_string(),
            line,
            msg: format!("`{key}` needs two comma-separated numbers, got `{value}`"),
        });
    }
    Ok([
        parse_number(parts[0], key, path, line)?,
        parse_number(parts[1], key, path, line)?,
    ])
}

fn parse_eta_mean(value: &str, p: usize, key: &str, path: &str, line: usize) -> Result<DVector<f64>> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() == 1 {
        // scalar: replicate over all coefficients
        let v: f64 = parse_number(parts[0], key, path, line)?;
        return Ok(DVector::from_element(p + 1, v));
    }
    if parts.len() != p + 1 {
        return Err(Error::Parse {
            path: path.to_string(),
            line,
            msg: format!(
                "`{key}` needs 1 or {} comma-separated numbers, got {}",
                p + 1,
                parts.len()
            ),
        });
    }
    let mut out = DVector::zeros(p + 1);
    for (i, part) in parts.iter().enumerate() {
        out[i] = parse_number(part, key, path, line)?;
    }
    Ok(out)
}

/// Render settings back to config text (used for manifest snapshots).
pub fn render_fit_config(s: &FitSettings) -> String {
    let mut out = String::new();
    let mut push = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    push("region.lower", format!("{}, {}", s.region.lower()[0], s.region.lower()[1]));
    push("region.upper", format!("{}, {}", s.region.upper()[0], s.region.upper()[1]));
    push("mcmc.n_iter", s.mcmc.n_iter.to_string());
    push("mcmc.burn_in", s.mcmc.burn_in.to_string());
    push("mcmc.thin", s.mcmc.thin.to_string());
    push("mcmc.seed", s.mcmc.seed.to_string());
    push("mcmc.scale_sigma2", s.mcmc.scale_sigma2.to_string());
    push("mcmc.scale_phi", s.mcmc.scale_phi.to_string());
    push("mcmc.scale_beta", s.mcmc.scale_beta.to_string());
    if let Some(phi) = s.mcmc.fix_phi {
        push("mcmc.fix_phi", phi.to_string());
    }
    push("mcmc.adapt", s.mcmc.adapt.to_string());
    push("mcmc.store_latent_full", s.mcmc.store_latent_full.to_string());
    push("prior.lambda_star.shape", s.priors.lambda_star.shape.to_string());
    push("prior.lambda_star.rate", s.priors.lambda_star.rate.to_string());
    if let Some(max) = s.priors.lambda_star_max {
        push("prior.lambda_star.max", max.to_string());
    }
    let eta_mean = s
        .priors
        .eta_mean
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    push("prior.eta.mean", eta_mean);
    push("prior.eta.var", s.priors.eta_var.to_string());
    push("prior.tau2.shape", s.priors.tau2.shape.to_string());
    push("prior.tau2.rate", s.priors.tau2.rate.to_string());
    push("prior.sigma2.shape", s.priors.sigma2.shape.to_string());
    push("prior.sigma2.rate", s.priors.sigma2.rate.to_string());
    push("prior.phi.shape", s.priors.phi.shape.to_string());
    push("prior.phi.rate", s.priors.phi.rate.to_string());
    push("prior.beta.mean", s.priors.beta.mean.to_string());
    push("prior.beta.var", s.priors.beta.var.to_string());
    out
}
