//! Exact Bayesian inference for geostatistical data under preferential sampling.
//!
//! Classical geostatistics assumes the sampled locations carry no information
//! about the latent field being measured. When surveys concentrate where the
//! field is high (or low) — *preferential sampling* — that assumption fails and
//! the usual kriging machinery produces biased estimates and predictions.
//!
//! This crate models the locations as a Cox point process whose intensity
//! `λ(x) = λ* Φ(β S(x)/σ)` is driven by the same Gaussian process `S` as the
//! responses. Because the probit link is bounded, the observed pattern can be
//! embedded in a homogeneous Poisson process by thinning, and the augmented
//! likelihood is available in closed form. The resulting MCMC sampler is exact:
//! no grid discretization, no likelihood approximation.
//!
//! What is provided:
//!
//! - [`inference::run_eps`] — the exact preferential-sampling sampler,
//! - [`inference::run_nps`] — the traditional non-preferential baseline,
//! - [`prediction`] — posterior predictive response and intensity surfaces,
//! - [`simulation`] — synthetic data generators for both regimes,
//! - [`evaluation`] — MAPE, interval coverage, predictive density scores,
//!   cross-validation, and a permutation-envelope variogram diagnostic,
//! - [`io`] — CSV dataset/draws formats, flat-file configs, and run manifests
//!   backing the `prefgeo` command-line tool.
//!
//! ```
//! use prefgeo::inference::{run_eps, McmcConfig, Priors};
//! use prefgeo::region::Region;
//! use prefgeo::rng::derive_rng;
//! use prefgeo::simulation::{simulate_ps, TrueParams};
//!
//! let region = Region::unit_square();
//! let truth = TrueParams { lambda_star: 40.0, ..TrueParams::default() };
//! let mut rng = derive_rng(7, "docs", 0);
//! let sim = simulate_ps(&truth, &region, &mut rng).unwrap();
//!
//! let priors = Priors::vague(0);
//! let config = McmcConfig { n_iter: 200, burn_in: 100, thin: 10, seed: 7, ..Default::default() };
//! let samples = run_eps(&sim.data, &region, &priors, &config).unwrap();
//! assert_eq!(samples.draws.len(), 10);
//! ```

pub mod data;
pub mod error;
pub mod evaluation;
pub mod gp;
pub mod inference;
pub mod io;
pub mod point_process;
pub mod prediction;
pub mod region;
pub mod rng;
pub mod simulation;
pub mod skew;

pub(crate) mod normal;

#[cfg(doctest)]
mod book;

pub use error::{Error, Result};
