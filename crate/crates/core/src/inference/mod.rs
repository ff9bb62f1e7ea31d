//! The MCMC engines: the exact preferential-sampling sampler and the
//! traditional non-preferential baseline.
//!
//! One chain is strictly sequential — every block conditions on the latest
//! state — and deterministic given its seed. Multiple chains are independent
//! given distinct seeds and can run on separate threads.

mod priors;
mod steps;

pub use priors::{GammaPrior, InvGammaPrior, McmcConfig, NormalPrior, Priors};
pub use steps::{
    build_latent_spec, draw_inverse_gamma, eta_full_conditional, log_phi_terms, log_ratio_beta,
    log_ratio_phi, log_ratio_sigma2, step_eta_tau2, step_lambda_star, MhBlock,
};

use nalgebra::DVector;
use rand::Rng;

use crate::data::GeoDataset;
use crate::error::{is_positive, Error, Result};
use crate::gp::{corr_matrix, factor_spd, CorrelationModel, GpParams, SpdFactor};
use crate::point_process::update_discarded;
use crate::region::{Point, Region};
use crate::rng::derive_rng;
use crate::skew::sn_gibbs_step;
use steps::{least_squares, standard_normal};

/// Which sampler produced a set of draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Exact preferential-sampling model.
    Eps,
    /// Non-preferential baseline.
    Nps,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Eps => "eps",
            ModelKind::Nps => "nps",
        }
    }
}

/// Current values of every block of the augmented chain.
///
/// `locs`/`s_k` hold the data locations first, then the discarded points;
/// the first `n` field slots stay aligned with the data throughout.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub lambda_star: f64,
    pub eta: DVector<f64>,
    pub tau2: f64,
    pub sigma2: f64,
    pub phi: f64,
    pub beta: f64,
    pub s_k: DVector<f64>,
    pub locs: Vec<Point>,
    pub n: usize,
}

impl ChainState {
    /// Total number of augmented-process points currently instantiated.
    pub fn k(&self) -> usize {
        self.locs.len()
    }

    pub fn check_invariants(&self) -> Result<()> {
        for (name, v) in [
            ("lambda_star", self.lambda_star),
            ("tau2", self.tau2),
            ("sigma2", self.sigma2),
            ("phi", self.phi),
        ] {
            if !is_positive(v) {
                return Err(Error::invalid(format!("chain state: {name} = {v} is not positive")));
            }
        }
        if self.k() < self.n {
            return Err(Error::invalid(format!(
                "chain state: k = {} smaller than n = {}",
                self.k(),
                self.n
            )));
        }
        if self.s_k.len() != self.k() {
            return Err(Error::LengthMismatch {
                what: "latent field values",
                got: self.s_k.len(),
                expected: self.k(),
            });
        }
        if self.s_k.iter().any(|v| !v.is_finite()) || !self.beta.is_finite() {
            return Err(Error::invalid("chain state contains non-finite values"));
        }
        Ok(())
    }
}

/// One retained posterior draw. The preferential-sampling fields are `None`
/// for the non-preferential model, whose output schema has no `λ*` or `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct Draw {
    pub iteration: u64,
    pub lambda_star: Option<f64>,
    pub eta: Vec<f64>,
    pub tau2: f64,
    pub sigma2: f64,
    pub phi: f64,
    pub beta: Option<f64>,
    pub k: usize,
    pub s_data: Vec<f64>,
    /// Discarded-point locations and field values, when full-latent storage
    /// is on.
    pub discarded: Option<(Vec<Point>, Vec<f64>)>,
}

/// Acceptance counters for one MH block.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AcceptCounter {
    pub accepted: u64,
    pub proposed: u64,
}

impl AcceptCounter {
    pub fn rate(&self) -> Option<f64> {
        (self.proposed > 0).then(|| self.accepted as f64 / self.proposed as f64)
    }
}

/// Thinned post-burn-in draws plus acceptance diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSamples {
    pub model: ModelKind,
    pub n_data: usize,
    /// Number of non-intercept covariates.
    pub p: usize,
    pub draws: Vec<Draw>,
    pub accept_sigma2: AcceptCounter,
    pub accept_phi: AcceptCounter,
    pub accept_beta: AcceptCounter,
}

impl PosteriorSamples {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Extract one scalar per draw.
    pub fn series<F: Fn(&Draw) -> f64>(&self, f: F) -> Vec<f64> {
        self.draws.iter().map(f).collect()
    }

    /// Summary of the augmented-process size across draws: (min, mean, max).
    pub fn k_summary(&self) -> Option<(usize, f64, usize)> {
        if self.draws.is_empty() {
            return None;
        }
        let min = self.draws.iter().map(|d| d.k).min().unwrap();
        let max = self.draws.iter().map(|d| d.k).max().unwrap();
        let mean = self.draws.iter().map(|d| d.k as f64).sum::<f64>() / self.draws.len() as f64;
        Some((min, mean, max))
    }
}

/// The three MH proposal blocks of a chain.
#[derive(Debug, Clone, Copy)]
pub struct MhBlocks {
    pub sigma2: MhBlock,
    pub phi: MhBlock,
    pub beta: MhBlock,
}

impl MhBlocks {
    fn new(config: &McmcConfig) -> Self {
        MhBlocks {
            sigma2: MhBlock::new(config.scale_sigma2),
            phi: MhBlock::new(config.scale_phi),
            beta: MhBlock::new(config.scale_beta),
        }
    }
}

fn corr_factor(locs: &[Point], phi: f64) -> Result<SpdFactor> {
    let model = CorrelationModel::exponential(phi)?;
    factor_spd(&corr_matrix(locs, &model), 1.0, "augmented-process correlation")
}

/// A preferential-sampling chain that can be advanced one sweep at a time.
///
/// [`run_eps`] wraps this; the step-at-a-time surface exists so joint
/// distribution tests can interleave sweeps with data regeneration.
pub struct EpsChain<'a> {
    pub data: &'a GeoDataset,
    pub region: Region,
    pub priors: &'a Priors,
    pub state: ChainState,
    pub blocks: MhBlocks,
    pub fix_phi: Option<f64>,
}

impl<'a> EpsChain<'a> {
    /// Initialize from the data: intensity at twice the observed density,
    /// least-squares trend, residual variance split between nugget and
    /// field, range at its prior mean, no preferentiality, zero field, and
    /// one discarded-process draw.
    pub fn new<R: Rng + ?Sized>(
        data: &'a GeoDataset,
        region: Region,
        priors: &'a Priors,
        config: &McmcConfig,
        rng: &mut R,
    ) -> Result<Self> {
        let n = data.n();
        if n == 0 {
            return Err(Error::invalid("cannot fit an empty dataset"));
        }
        let eta = least_squares(data.y(), data.design());
        let resid = data.y() - data.design() * &eta;
        let var = (resid.norm_squared() / n as f64).max(1e-8);
        let phi = config.fix_phi.unwrap_or(priors.phi.shape / priors.phi.rate);
        let mut state = ChainState {
            lambda_star: 2.0 * n as f64 / region.area(),
            eta,
            tau2: var / 2.0,
            sigma2: var / 2.0,
            phi,
            beta: 0.0,
            s_k: DVector::zeros(n),
            locs: data.locations().to_vec(),
            n,
        };
        attach_discarded(&mut state, &region, rng)?;
        Ok(EpsChain {
            data,
            region,
            priors,
            state,
            blocks: MhBlocks::new(config),
            fix_phi: config.fix_phi,
        })
    }

    /// Wrap an externally prepared state (joint-distribution harnesses).
    pub fn from_state(
        data: &'a GeoDataset,
        region: Region,
        priors: &'a Priors,
        state: ChainState,
        config: &McmcConfig,
    ) -> Self {
        EpsChain {
            data,
            region,
            priors,
            state,
            blocks: MhBlocks::new(config),
            fix_phi: config.fix_phi,
        }
    }

    /// One full sweep over all blocks. `adapt_step` enables the
    /// Robbins-Monro scale update with the given schedule index.
    pub fn sweep<R: Rng + ?Sized>(&mut self, rng: &mut R, adapt_step: Option<usize>) -> Result<()> {
        let n = self.state.n;

        // envelope intensity
        self.state.lambda_star = step_lambda_star(
            self.state.k(),
            &self.priors.lambda_star,
            self.priors.lambda_star_max,
            self.region.area(),
            rng,
        )?;

        // discarded-process redraw, kriged from the full current field
        let corr = CorrelationModel::exponential(self.state.phi)?;
        let gp = GpParams::new(self.state.sigma2, corr)?;
        let disc = update_discarded(
            self.state.lambda_star,
            self.state.beta,
            &gp,
            &self.state.locs,
            self.state.s_k.as_slice(),
            &self.region,
            rng,
        )?;
        self.state.locs.truncate(n);
        self.state.locs.extend_from_slice(&disc.locations);
        let mut s_new = DVector::zeros(self.state.locs.len());
        for i in 0..n {
            s_new[i] = self.state.s_k[i];
        }
        if let Some(marks) = &disc.marks {
            for (i, &m) in marks.iter().enumerate() {
                s_new[n + i] = m;
            }
        }
        self.state.s_k = s_new;

        let factor = corr_factor(&self.state.locs, self.state.phi)?;
        let corr_inv = factor.inverse();

        // latent field
        let spec = build_latent_spec(
            self.data.y(),
            self.data.design(),
            &self.state.eta,
            self.state.tau2,
            self.state.sigma2,
            self.state.beta,
            &corr_inv,
            n,
        )?;
        self.state.s_k = sn_gibbs_step(&self.state.s_k, &spec, rng)?;

        // trend and nugget
        let s_n = self.state.s_k.rows(0, n).into_owned();
        let (eta, tau2) = step_eta_tau2(
            self.data.y(),
            self.data.design(),
            &s_n,
            self.state.tau2,
            self.priors,
            rng,
        )?;
        self.state.eta = eta;
        self.state.tau2 = tau2;

        // field variance (lognormal walk)
        let quad = factor.quad_form(&self.state.s_k);
        let proposal = (self.state.sigma2.ln() + self.blocks.sigma2.scale * standard_normal(rng)).exp();
        let lr = log_ratio_sigma2(
            proposal,
            self.state.sigma2,
            &self.state.s_k,
            n,
            quad,
            self.state.beta,
            &self.priors.sigma2,
        );
        if self.blocks.sigma2.decide(lr, rng) {
            self.state.sigma2 = proposal;
        }
        if let Some(step) = adapt_step {
            self.blocks.sigma2.adapt(lr, step);
        }

        // correlation range (lognormal walk), unless held fixed
        if self.fix_phi.is_none() {
            let proposal = (self.state.phi.ln() + self.blocks.phi.scale * standard_normal(rng)).exp();
            match corr_factor(&self.state.locs, proposal) {
                Err(Error::IllConditioned { .. }) => {
                    // unfactorable proposal: reject it and move on
                    self.blocks.phi.proposed += 1;
                }
                Err(e) => return Err(e),
                Ok(factor_p) => {
                    let quad_p = factor_p.quad_form(&self.state.s_k);
                    let lr = log_ratio_phi(
                        proposal,
                        self.state.phi,
                        factor_p.log_det(),
                        factor.log_det(),
                        quad_p,
                        quad,
                        self.state.sigma2,
                        &self.priors.phi,
                    );
                    if self.blocks.phi.decide(lr, rng) {
                        self.state.phi = proposal;
                    }
                    if let Some(step) = adapt_step {
                        self.blocks.phi.adapt(lr, step);
                    }
                }
            }
        }

        // preferentiality (Gaussian walk)
        let proposal = self.state.beta + self.blocks.beta.scale * standard_normal(rng);
        let lr = log_ratio_beta(
            proposal,
            self.state.beta,
            &self.state.s_k,
            n,
            self.state.sigma2.sqrt(),
            &self.priors.beta,
        );
        if self.blocks.beta.decide(lr, rng) {
            self.state.beta = proposal;
        }
        if let Some(step) = adapt_step {
            self.blocks.beta.adapt(lr, step);
        }

        self.state.check_invariants()
    }

    fn record(&self, iteration: u64, store_latent: bool) -> Draw {
        let n = self.state.n;
        Draw {
            iteration,
            lambda_star: Some(self.state.lambda_star),
            eta: self.state.eta.iter().copied().collect(),
            tau2: self.state.tau2,
            sigma2: self.state.sigma2,
            phi: self.state.phi,
            beta: Some(self.state.beta),
            k: self.state.k(),
            s_data: self.state.s_k.as_slice()[..n].to_vec(),
            discarded: store_latent.then(|| {
                (
                    self.state.locs[n..].to_vec(),
                    self.state.s_k.as_slice()[n..].to_vec(),
                )
            }),
        }
    }
}

/// Redraw the discarded block in place (used at initialization).
fn attach_discarded<R: Rng + ?Sized>(
    state: &mut ChainState,
    region: &Region,
    rng: &mut R,
) -> Result<()> {
    let corr = CorrelationModel::exponential(state.phi)?;
    let gp = GpParams::new(state.sigma2, corr)?;
    let n = state.n;
    let disc = update_discarded(
        state.lambda_star,
        state.beta,
        &gp,
        &state.locs[..n],
        &state.s_k.as_slice()[..n],
        region,
        rng,
    )?;
    state.locs.truncate(n);
    state.locs.extend_from_slice(&disc.locations);
    let mut s_new = DVector::zeros(state.locs.len());
    for i in 0..n {
        s_new[i] = state.s_k[i];
    }
    if let Some(marks) = &disc.marks {
        for (i, &m) in marks.iter().enumerate() {
            s_new[n + i] = m;
        }
    }
    state.s_k = s_new;
    Ok(())
}

/// Run the exact preferential-sampling sampler.
///
/// Blocks are visited in a fixed order each iteration: envelope intensity,
/// discarded process, latent field, trend and nugget, field variance, range,
/// preferentiality. Field prediction at new locations is not part of the
/// parameter chain; it happens on demand at prediction time.
pub fn run_eps(
    data: &GeoDataset,
    region: &Region,
    priors: &Priors,
    config: &McmcConfig,
) -> Result<PosteriorSamples> {
    config.validate()?;
    priors.validate(data.p())?;
    let mut rng = derive_rng(config.seed, "fit-eps", 0);
    let mut chain = EpsChain::new(data, *region, priors, config, &mut rng)?;

    let mut draws = Vec::with_capacity(config.retained());
    for it in 0..config.n_iter {
        let adapt_step = (config.adapt && it < config.burn_in).then_some(it);
        chain
            .sweep(&mut rng, adapt_step)
            .map_err(|e| Error::Sampler {
                iteration: it,
                source: Box::new(e),
            })?;
        if it >= config.burn_in && (it - config.burn_in + 1).is_multiple_of(config.thin) {
            draws.push(chain.record(it as u64 + 1, config.store_latent_full));
        }
    }
    Ok(PosteriorSamples {
        model: ModelKind::Eps,
        n_data: data.n(),
        p: data.p(),
        draws,
        accept_sigma2: AcceptCounter {
            accepted: chain.blocks.sigma2.accepted,
            proposed: chain.blocks.sigma2.proposed,
        },
        accept_phi: AcceptCounter {
            accepted: chain.blocks.phi.accepted,
            proposed: chain.blocks.phi.proposed,
        },
        accept_beta: AcceptCounter {
            accepted: chain.blocks.beta.accepted,
            proposed: chain.blocks.beta.proposed,
        },
    })
}

/// Run the traditional non-preferential sampler: conjugate field, trend, and
/// nugget updates plus the same MH kernels for variance and range, with no
/// point-process terms.
pub fn run_nps(data: &GeoDataset, priors: &Priors, config: &McmcConfig) -> Result<PosteriorSamples> {
    config.validate()?;
    priors.validate(data.p())?;
    let n = data.n();
    if n == 0 {
        return Err(Error::invalid("cannot fit an empty dataset"));
    }
    let mut rng = derive_rng(config.seed, "fit-nps", 0);

    let eta = least_squares(data.y(), data.design());
    let resid = data.y() - data.design() * &eta;
    let var = (resid.norm_squared() / n as f64).max(1e-8);
    let mut state = ChainState {
        lambda_star: 1.0, // unused by this model
        eta,
        tau2: var / 2.0,
        sigma2: var / 2.0,
        phi: config.fix_phi.unwrap_or(priors.phi.shape / priors.phi.rate),
        beta: 0.0, // unused by this model
        s_k: DVector::zeros(n),
        locs: data.locations().to_vec(),
        n,
    };
    let mut blocks = MhBlocks::new(config);

    let mut draws = Vec::with_capacity(config.retained());
    for it in 0..config.n_iter {
        let adapt_step = (config.adapt && it < config.burn_in).then_some(it);
        nps_sweep(&mut state, data, priors, &mut blocks, config.fix_phi, adapt_step, &mut rng)
            .map_err(|e| Error::Sampler {
                iteration: it,
                source: Box::new(e),
            })?;
        if it >= config.burn_in && (it - config.burn_in + 1).is_multiple_of(config.thin) {
            draws.push(Draw {
                iteration: it as u64 + 1,
                lambda_star: None,
                eta: state.eta.iter().copied().collect(),
                tau2: state.tau2,
                sigma2: state.sigma2,
                phi: state.phi,
                beta: None,
                k: n,
                s_data: state.s_k.as_slice().to_vec(),
                discarded: None,
            });
        }
    }
    Ok(PosteriorSamples {
        model: ModelKind::Nps,
        n_data: n,
        p: data.p(),
        draws,
        accept_sigma2: AcceptCounter {
            accepted: blocks.sigma2.accepted,
            proposed: blocks.sigma2.proposed,
        },
        accept_phi: AcceptCounter {
            accepted: blocks.phi.accepted,
            proposed: blocks.phi.proposed,
        },
        accept_beta: AcceptCounter::default(),
    })
}

fn nps_sweep<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &GeoDataset,
    priors: &Priors,
    blocks: &mut MhBlocks,
    fix_phi: Option<f64>,
    adapt_step: Option<usize>,
    rng: &mut R,
) -> Result<()> {
    let n = state.n;
    let factor = corr_factor(&state.locs, state.phi)?;
    let corr_inv = factor.inverse();

    // latent field: same assembly with zero preferentiality, so the sweep is
    // an exact conjugate Gaussian draw
    let spec = build_latent_spec(
        data.y(),
        data.design(),
        &state.eta,
        state.tau2,
        state.sigma2,
        0.0,
        &corr_inv,
        n,
    )?;
    state.s_k = sn_gibbs_step(&state.s_k, &spec, rng)?;

    let (eta, tau2) = step_eta_tau2(data.y(), data.design(), &state.s_k, state.tau2, priors, rng)?;
    state.eta = eta;
    state.tau2 = tau2;

    let quad = factor.quad_form(&state.s_k);
    let proposal = (state.sigma2.ln() + blocks.sigma2.scale * standard_normal(rng)).exp();
    let lr = log_ratio_sigma2(proposal, state.sigma2, &state.s_k, n, quad, 0.0, &priors.sigma2);
    if blocks.sigma2.decide(lr, rng) {
        state.sigma2 = proposal;
    }
    if let Some(step) = adapt_step {
        blocks.sigma2.adapt(lr, step);
    }

    if fix_phi.is_none() {
        let proposal = (state.phi.ln() + blocks.phi.scale * standard_normal(rng)).exp();
        match corr_factor(&state.locs, proposal) {
            Err(Error::IllConditioned { .. }) => {
                blocks.phi.proposed += 1;
            }
            Err(e) => return Err(e),
            Ok(factor_p) => {
                let quad_p = factor_p.quad_form(&state.s_k);
                let lr = log_ratio_phi(
                    proposal,
                    state.phi,
                    factor_p.log_det(),
                    factor.log_det(),
                    quad_p,
                    quad,
                    state.sigma2,
                    &priors.phi,
                );
                if blocks.phi.decide(lr, rng) {
                    state.phi = proposal;
                }
                if let Some(step) = adapt_step {
                    blocks.phi.adapt(lr, step);
                }
            }
        }
    }

    state.check_invariants()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use crate::simulation::{simulate_ps, TrueParams};

    fn small_dataset(seed: u64) -> (GeoDataset, Region) {
        let region = Region::unit_square();
        let truth = TrueParams {
            lambda_star: 60.0,
            ..TrueParams::default()
        };
        let mut rng = derive_rng(seed, "inference-data", 0);
        let sim = simulate_ps(&truth, &region, &mut rng).unwrap();
        (sim.data, region)
    }

    #[test]
    fn eps_is_deterministic_given_seed() {
        let (data, region) = small_dataset(61);
        let priors = Priors::vague(0);
        let config = McmcConfig {
            n_iter: 300,
            burn_in: 100,
            thin: 5,
            seed: 99,
            ..Default::default()
        };
        let a = run_eps(&data, &region, &priors, &config).unwrap();
        let b = run_eps(&data, &region, &priors, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.draws.len(), config.retained());
    }

    #[test]
    fn eps_smoke_run_produces_legal_draws() {
        let (data, region) = small_dataset(62);
        let priors = Priors::vague(0);
        let config = McmcConfig {
            n_iter: 1_000,
            burn_in: 200,
            thin: 4,
            seed: 7,
            ..Default::default()
        };
        let out = run_eps(&data, &region, &priors, &config).unwrap();
        assert_eq!(out.model, ModelKind::Eps);
        assert_eq!(out.draws.len(), config.retained());
        for d in &out.draws {
            assert!(d.lambda_star.unwrap() > 0.0);
            assert!(d.tau2 > 0.0 && d.sigma2 > 0.0 && d.phi > 0.0);
            assert!(d.k >= data.n());
            assert_eq!(d.s_data.len(), data.n());
            assert!(d.beta.unwrap().is_finite());
        }
        for counter in [out.accept_sigma2, out.accept_beta] {
            let rate = counter.rate().unwrap();
            assert!(rate > 0.0 && rate < 1.0, "acceptance rate {rate}");
        }
    }

    #[test]
    fn eps_respects_fixed_range() {
        let (data, region) = small_dataset(63);
        let priors = Priors::vague(0);
        let config = McmcConfig {
            n_iter: 200,
            burn_in: 50,
            thin: 3,
            seed: 5,
            fix_phi: Some(0.25),
            ..Default::default()
        };
        let out = run_eps(&data, &region, &priors, &config).unwrap();
        assert!(out.draws.iter().all(|d| d.phi == 0.25));
        assert_eq!(out.accept_phi.proposed, 0);
    }

    #[test]
    fn eps_can_store_full_latent_state() {
        let (data, region) = small_dataset(64);
        let priors = Priors::vague(0);
        let config = McmcConfig {
            n_iter: 120,
            burn_in: 40,
            thin: 4,
            seed: 3,
            store_latent_full: true,
            ..Default::default()
        };
        let out = run_eps(&data, &region, &priors, &config).unwrap();
        for d in &out.draws {
            let (locs, s) = d.discarded.as_ref().unwrap();
            assert_eq!(locs.len(), s.len());
            assert_eq!(locs.len() + data.n(), d.k);
        }
    }

    #[test]
    fn nps_schema_has_no_preferentiality_fields() {
        let (data, _) = small_dataset(65);
        let priors = Priors::vague(0);
        let config = McmcConfig {
            n_iter: 400,
            burn_in: 100,
            thin: 3,
            seed: 11,
            ..Default::default()
        };
        let out = run_nps(&data, &priors, &config).unwrap();
        assert_eq!(out.model, ModelKind::Nps);
        assert_eq!(out.draws.len(), config.retained());
        for d in &out.draws {
            assert_eq!(d.lambda_star, None);
            assert_eq!(d.beta, None);
            assert_eq!(d.k, data.n());
        }
        assert_eq!(out.accept_beta.rate(), None);
    }

    #[test]
    fn nps_is_deterministic_given_seed() {
        let (data, _) = small_dataset(66);
        let priors = Priors::vague(0);
        let config = McmcConfig {
            n_iter: 300,
            burn_in: 100,
            thin: 5,
            seed: 42,
            ..Default::default()
        };
        let a = run_nps(&data, &priors, &config).unwrap();
        let b = run_nps(&data, &priors, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_survives_empty_states() {
        // states with no observations (and transiently no points at all) are
        // legal in joint-distribution harnesses
        let data = GeoDataset::new(vec![], vec![], None).unwrap();
        let mut priors = Priors::vague(0);
        // an informative envelope prior; the vague default keeps the chain
        // legitimately near zero points when there is no data at all
        priors.lambda_star = GammaPrior { shape: 30.0, rate: 3.0 };
        let config = McmcConfig {
            fix_phi: Some(0.3),
            ..Default::default()
        };
        let state = ChainState {
            lambda_star: 5.0,
            eta: DVector::from_element(1, 1.0),
            tau2: 0.3,
            sigma2: 1.0,
            phi: 0.3,
            beta: 0.2,
            s_k: DVector::zeros(0),
            locs: vec![],
            n: 0,
        };
        let mut chain = EpsChain::from_state(&data, Region::unit_square(), &priors, state, &config);
        let mut rng = derive_rng(67, "empty-sweep", 0);
        let mut saw_empty = false;
        let mut saw_points = false;
        for _ in 0..200 {
            chain.sweep(&mut rng, None).unwrap();
            saw_empty |= chain.state.k() == 0;
            saw_points |= chain.state.k() > 0;
        }
        assert!(saw_points, "chain never instantiated any points");
        let _ = saw_empty;
    }

    #[test]
    fn empty_dataset_rejected() {
        let data = GeoDataset::new(vec![], vec![], None).unwrap();
        let priors = Priors::vague(0);
        let config = McmcConfig::default();
        assert!(run_eps(&data, &Region::unit_square(), &priors, &config).is_err());
        assert!(run_nps(&data, &priors, &config).is_err());
    }
}
