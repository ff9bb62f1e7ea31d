//! Synthetic data generation under the preferential and non-preferential
//! regimes.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::data::GeoDataset;
use crate::error::{is_positive, Error, Result};
use crate::gp::{conditional_draw, gp_draw, CorrelationModel, GpParams};
use crate::point_process::{hpp_draw, thin_split, PointPattern};
use crate::region::{Point, Region};

const MAX_ATTEMPTS: u32 = 100;

/// Generating parameters `(λ*, μ, τ², σ², φ, β)` for an intercept-only model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrueParams {
    pub lambda_star: f64,
    pub mu: f64,
    pub tau2: f64,
    pub sigma2: f64,
    pub phi: f64,
    pub beta: f64,
}

impl TrueParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda_star", self.lambda_star),
            ("tau2", self.tau2),
            ("sigma2", self.sigma2),
            ("phi", self.phi),
        ] {
            if !is_positive(v) {
                return Err(Error::invalid(format!("true parameter {name} must be positive, got {v}")));
            }
        }
        if !self.mu.is_finite() || !self.beta.is_finite() {
            return Err(Error::invalid("true parameters must be finite"));
        }
        Ok(())
    }

    pub fn gp(&self) -> Result<GpParams> {
        GpParams::new(self.sigma2, CorrelationModel::exponential(self.phi)?)
    }
}

impl Default for TrueParams {
    /// The reference simulation scenario on the unit square.
    fn default() -> Self {
        TrueParams {
            lambda_star: 150.0,
            mu: 4.0,
            tau2: 0.10,
            sigma2: 3.0,
            phi: 0.15,
            beta: 2.0,
        }
    }
}

/// A synthetic dataset plus the realized latent field, kept for diagnostics
/// and for evaluating predictions against ground truth.
#[derive(Debug, Clone)]
pub struct SimulatedField {
    pub data: GeoDataset,
    /// Field values at the retained (observed) locations.
    pub s_at_data: Vec<f64>,
    /// The thinned-away points with their field values (empty for the
    /// non-preferential generator).
    pub discarded: PointPattern,
    /// How many envelope draws it took to get a nonempty sample.
    pub attempts: u32,
}

impl SimulatedField {
    /// All locations where the field was realized, observed and discarded.
    fn known(&self) -> (Vec<Point>, Vec<f64>) {
        let mut locs = self.data.locations().to_vec();
        let mut s = self.s_at_data.clone();
        locs.extend_from_slice(&self.discarded.locations);
        if let Some(marks) = &self.discarded.marks {
            s.extend_from_slice(marks);
        }
        (locs, s)
    }

    /// Extend the realized field to new locations by an exact conditional
    /// draw given everything that was realized during generation.
    pub fn realize_field_at<R: Rng + ?Sized>(
        &self,
        params: &TrueParams,
        targets: &[Point],
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        let (locs, s) = self.known();
        let draw = conditional_draw(targets, &locs, &s, &params.gp()?, rng)?;
        Ok(draw.iter().copied().collect())
    }

    /// Ground-truth responses at new locations: trend plus the extended
    /// field plus fresh observation noise.
    pub fn realize_response_at<R: Rng + ?Sized>(
        &self,
        params: &TrueParams,
        targets: &[Point],
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        let s = self.realize_field_at(params, targets, rng)?;
        response_from_field(params, &s, rng)
    }
}

/// Noisy responses over given field values: `μ + S + N(0, τ²)` per entry.
pub fn response_from_field<R: Rng + ?Sized>(
    params: &TrueParams,
    field: &[f64],
    rng: &mut R,
) -> Result<Vec<f64>> {
    let noise = Normal::new(0.0, params.tau2.sqrt())
        .map_err(|e| Error::invalid(format!("noise scale: {e}")))?;
    Ok(field.iter().map(|v| params.mu + v + noise.sample(rng)).collect())
}

/// Generate one preferentially sampled dataset: an envelope pattern, a joint
/// field draw at its points, probit thinning keeping `Φ(βS/σ)`, and noisy
/// responses at the kept points.
///
/// Degenerate regimes that keep zero points are retried up to 100 times
/// before failing.
pub fn simulate_ps<R: Rng + ?Sized>(
    params: &TrueParams,
    region: &Region,
    rng: &mut R,
) -> Result<SimulatedField> {
    params.validate()?;
    let gp = params.gp()?;
    let noise = Normal::new(0.0, params.tau2.sqrt())
        .map_err(|e| Error::invalid(format!("noise scale: {e}")))?;
    for attempt in 1..=MAX_ATTEMPTS {
        let envelope = hpp_draw(params.lambda_star, region, rng)?;
        if envelope.is_empty() {
            continue;
        }
        let field = gp_draw(&envelope.locations, &gp, rng)?;
        let marked =
            PointPattern::with_marks(envelope.locations, field.iter().copied().collect())?;
        let (kept, dropped) = thin_split(&marked, params.beta, gp.sigma(), rng)?;
        if kept.is_empty() {
            continue;
        }
        let s_at_data = kept.marks.clone().unwrap();
        let y: Vec<f64> = s_at_data.iter().map(|s| params.mu + s + noise.sample(rng)).collect();
        return Ok(SimulatedField {
            data: GeoDataset::new(kept.locations, y, None)?,
            s_at_data,
            discarded: dropped,
            attempts: attempt,
        });
    }
    Err(Error::DegenerateSimulation(MAX_ATTEMPTS))
}

/// Generate one non-preferential dataset: locations from a homogeneous
/// pattern independent of the field, then responses at those locations.
/// `β` and `λ*` in `params` are ignored; the sampling intensity is given
/// separately.
pub fn simulate_nps<R: Rng + ?Sized>(
    params: &TrueParams,
    intensity: f64,
    region: &Region,
    rng: &mut R,
) -> Result<SimulatedField> {
    params.validate()?;
    let gp = params.gp()?;
    let noise = Normal::new(0.0, params.tau2.sqrt())
        .map_err(|e| Error::invalid(format!("noise scale: {e}")))?;
    for attempt in 1..=MAX_ATTEMPTS {
        let pattern = hpp_draw(intensity, region, rng)?;
        if pattern.is_empty() {
            continue;
        }
        let field = gp_draw(&pattern.locations, &gp, rng)?;
        let s_at_data: Vec<f64> = field.iter().copied().collect();
        let y: Vec<f64> = s_at_data.iter().map(|s| params.mu + s + noise.sample(rng)).collect();
        return Ok(SimulatedField {
            data: GeoDataset::new(pattern.locations, y, None)?,
            s_at_data,
            discarded: PointPattern::with_marks(Vec::new(), Vec::new())?,
            attempts: attempt,
        });
    }
    Err(Error::DegenerateSimulation(MAX_ATTEMPTS))
}
