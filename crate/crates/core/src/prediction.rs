//! Posterior predictive inference for the response and the sampling
//! intensity at unobserved locations.
//!
//! For every retained posterior draw the field is kriged onto the target
//! locations given the draw's field values, the trend and observation noise
//! are added for the response, and the probit intensity is evaluated for the
//! sampling surface. Only per-location summaries are reported, so the
//! kriging works with marginal conditionals — exact at each location and
//! linear in the number of targets.
//!
//! Per-draw random streams are derived from `(seed, purpose, draw index)`,
//! so results are reproducible regardless of evaluation order.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::data::GeoDataset;
use crate::error::{Error, Result};
use crate::gp::{conditional_marginals, CorrelationModel, GpParams};
use crate::inference::{Draw, ModelKind, PosteriorSamples};
use crate::normal::phi;
use crate::region::{Point, Region};
use crate::rng::derive_rng;

/// Unobserved locations and their covariates.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionGrid {
    locations: Vec<Point>,
    design: DMatrix<f64>,
}

impl PredictionGrid {
    /// Build a grid, checking every location lies inside the region.
    /// `covariates` rows must align with `locations`; `None` means
    /// intercept-only.
    pub fn new(
        locations: Vec<Point>,
        covariates: Option<DMatrix<f64>>,
        region: &Region,
    ) -> Result<Self> {
        for p in &locations {
            if !region.contains(p) {
                return Err(Error::invalid(format!(
                    "prediction location ({}, {}) lies outside the study region",
                    p.x, p.y
                )));
            }
        }
        let n = locations.len();
        let design = match covariates {
            None => DMatrix::from_element(n, 1, 1.0),
            Some(c) => {
                if c.nrows() != n {
                    return Err(Error::LengthMismatch {
                        what: "grid covariate rows",
                        got: c.nrows(),
                        expected: n,
                    });
                }
                let mut d = DMatrix::zeros(n, c.ncols() + 1);
                d.column_mut(0).fill(1.0);
                d.view_mut((0, 1), (n, c.ncols())).copy_from(&c);
                d
            }
        };
        Ok(PredictionGrid { locations, design })
    }

    /// Centers of a regular `nx × ny` tiling of the region, intercept-only.
    pub fn regular(region: &Region, nx: usize, ny: usize) -> Self {
        let locations = region.grid_centers(nx, ny);
        let n = locations.len();
        PredictionGrid {
            locations,
            design: DMatrix::from_element(n, 1, 1.0),
        }
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn locations(&self) -> &[Point] {
        &self.locations
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }
}

/// Per-draw Gaussian mixture components of the predictive law at each
/// location: row `m`, column `j` describe draw `m` at location `j`.
#[derive(Debug, Clone)]
pub struct PredictiveMixture {
    pub locations: Vec<Point>,
    /// Trend plus kriged field mean.
    pub y_mean: DMatrix<f64>,
    /// √(kriging variance + nugget).
    pub y_sd: DMatrix<f64>,
    /// Kriged field mean alone.
    pub s_mean: DMatrix<f64>,
    /// Kriging variance alone.
    pub s_var: DMatrix<f64>,
}

/// Build the per-draw predictive mixture for a grid.
///
/// Each draw conditions on the stored field values at the data locations,
/// plus the discarded-point values when the chain stored them; otherwise the
/// discarded block is marginalized by the kriging itself.
pub fn predictive_mixture(
    samples: &PosteriorSamples,
    data: &GeoDataset,
    grid: &PredictionGrid,
) -> Result<PredictiveMixture> {
    if samples.is_empty() {
        return Err(Error::invalid("no posterior draws to predict from"));
    }
    if grid.design.ncols() != data.p() + 1 {
        return Err(Error::LengthMismatch {
            what: "grid covariate columns",
            got: grid.design.ncols() - 1,
            expected: data.p(),
        });
    }
    let m = samples.len();
    let t = grid.len();
    let mut y_mean = DMatrix::zeros(m, t);
    let mut y_sd = DMatrix::zeros(m, t);
    let mut s_mean = DMatrix::zeros(m, t);
    let mut s_var = DMatrix::zeros(m, t);

    let mut known_locs: Vec<Point> = Vec::new();
    let mut known_s: Vec<f64> = Vec::new();
    for (row, draw) in samples.draws.iter().enumerate() {
        known_locs.clear();
        known_locs.extend_from_slice(data.locations());
        known_s.clear();
        known_s.extend_from_slice(&draw.s_data);
        if let Some((locs, s)) = &draw.discarded {
            known_locs.extend_from_slice(locs);
            known_s.extend_from_slice(s);
        }
        let gp = GpParams::new(draw.sigma2, CorrelationModel::exponential(draw.phi)?)?;
        let (means, vars) = conditional_marginals(grid.locations(), &known_locs, &known_s, &gp)?;
        let eta = DVector::from_column_slice(&draw.eta);
        let trend = &grid.design * &eta;
        for j in 0..t {
            s_mean[(row, j)] = means[j];
            s_var[(row, j)] = vars[j];
            y_mean[(row, j)] = trend[j] + means[j];
            y_sd[(row, j)] = (vars[j] + draw.tau2).sqrt();
        }
    }
    Ok(PredictiveMixture {
        locations: grid.locations().to_vec(),
        y_mean,
        y_sd,
        s_mean,
        s_var,
    })
}

/// An equal-tailed predictive interval at one nominal level.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSummary {
    pub level: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Per-location predictive summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveField {
    pub locations: Vec<Point>,
    pub mean: Vec<f64>,
    pub median: Vec<f64>,
    pub intervals: Vec<IntervalSummary>,
}

impl PredictiveField {
    pub fn interval(&self, level: f64) -> Option<&IntervalSummary> {
        self.intervals.iter().find(|i| (i.level - level).abs() < 1e-9)
    }
}

fn validate_levels(levels: &[f64]) -> Result<()> {
    for &l in levels {
        if !(l > 0.0 && l < 1.0) {
            return Err(Error::invalid(format!("interval level must lie in (0,1), got {l}")));
        }
    }
    Ok(())
}

/// Linear-interpolation quantile of a sorted slice.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

/// Summarize a draws-by-locations matrix; `exact_mean` overrides the sample
/// mean when the mixture mean is available in closed form.
fn summarize(
    locations: Vec<Point>,
    draws: &DMatrix<f64>,
    exact_mean: Option<Vec<f64>>,
    levels: &[f64],
) -> PredictiveField {
    let t = draws.ncols();
    let mut mean = Vec::with_capacity(t);
    let mut median = Vec::with_capacity(t);
    let mut intervals: Vec<IntervalSummary> = levels
        .iter()
        .map(|&level| IntervalSummary {
            level,
            lower: Vec::with_capacity(t),
            upper: Vec::with_capacity(t),
        })
        .collect();

    let mut column = vec![0.0f64; draws.nrows()];
    for j in 0..t {
        for (i, v) in column.iter_mut().enumerate() {
            *v = draws[(i, j)];
        }
        column.sort_by(f64::total_cmp);
        mean.push(column.iter().sum::<f64>() / column.len() as f64);
        median.push(quantile_sorted(&column, 0.5));
        for summary in intervals.iter_mut() {
            let alpha = 1.0 - summary.level;
            summary.lower.push(quantile_sorted(&column, alpha / 2.0));
            summary.upper.push(quantile_sorted(&column, 1.0 - alpha / 2.0));
        }
    }
    if let Some(exact) = exact_mean {
        mean = exact;
    }
    PredictiveField {
        locations,
        mean,
        median,
        intervals,
    }
}

/// Posterior predictive summaries of the response over a grid.
///
/// Per draw and location, `Y = D_u η + S_u + ε` is sampled from its exact
/// marginal mixture component; the reported mean is the mixture mean itself
/// (the noise integrates out), while median and intervals come from the
/// sampled draws.
pub fn predict_response(
    samples: &PosteriorSamples,
    data: &GeoDataset,
    grid: &PredictionGrid,
    levels: &[f64],
    seed: u64,
) -> Result<PredictiveField> {
    validate_levels(levels)?;
    let mixture = predictive_mixture(samples, data, grid)?;
    let m = mixture.y_mean.nrows();
    let t = mixture.y_mean.ncols();
    let mut draws = DMatrix::zeros(m, t);
    for row in 0..m {
        let mut rng = derive_rng(seed, "predict-response", row as u64);
        for j in 0..t {
            let z: f64 = StandardNormal.sample(&mut rng);
            draws[(row, j)] = mixture.y_mean[(row, j)] + mixture.y_sd[(row, j)] * z;
        }
    }
    let exact_mean: Vec<f64> = (0..t)
        .map(|j| mixture.y_mean.column(j).sum() / m as f64)
        .collect();
    let field = summarize(mixture.locations.clone(), &draws, Some(exact_mean), levels);
    debug_assert!(field.mean.iter().all(|v| v.is_finite()));
    Ok(field)
}

/// Posterior predictive summaries of the sampling intensity
/// `λ(x) = λ* Φ(β S(x)/σ)` over a grid. Only meaningful for draws from the
/// preferential model.
pub fn predict_intensity(
    samples: &PosteriorSamples,
    data: &GeoDataset,
    grid: &PredictionGrid,
    levels: &[f64],
    seed: u64,
) -> Result<PredictiveField> {
    if samples.model != ModelKind::Eps {
        return Err(Error::ModelMismatch {
            expected: "eps",
            got: samples.model.as_str(),
        });
    }
    validate_levels(levels)?;
    let mixture = predictive_mixture(samples, data, grid)?;
    let m = mixture.s_mean.nrows();
    let t = mixture.s_mean.ncols();
    let mut draws = DMatrix::zeros(m, t);
    for (row, draw) in samples.draws.iter().enumerate() {
        let mut rng = derive_rng(seed, "predict-intensity", row as u64);
        for j in 0..t {
            let z: f64 = StandardNormal.sample(&mut rng);
            let s = mixture.s_mean[(row, j)] + mixture.s_var[(row, j)].sqrt() * z;
            draws[(row, j)] = intensity_at(draw, s);
        }
    }
    Ok(summarize(mixture.locations.clone(), &draws, None, levels))
}

/// The probit intensity of one draw at a given field value.
pub fn intensity_at(draw: &Draw, s: f64) -> f64 {
    let lambda_star = draw.lambda_star.expect("intensity requires preferential-model draws");
    let beta = draw.beta.expect("intensity requires preferential-model draws");
    lambda_star * phi(beta * s / draw.sigma2.sqrt())
}
