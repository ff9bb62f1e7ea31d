//! Prediction-quality metrics, cross-validation, and the empirical
//! variogram permutation-envelope diagnostic.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::GeoDataset;
use crate::error::{Error, Result};
use crate::inference::{run_eps, run_nps, McmcConfig, ModelKind, Priors};
use crate::prediction::{predictive_mixture, PredictionGrid};
use crate::region::Region;
use crate::rng::{derive_rng, derive_u64};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;
const PPD_FLOOR: f64 = -1e6;

/// Aggregated prediction-quality measures. `crci` maps nominal interval
/// levels to observed coverage fractions; `ppd` is the summed log predictive
/// density at the held-out truths (absent when density components are not
/// available).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub mape: f64,
    pub crci: Vec<(f64, f64)>,
    pub ppd: Option<f64>,
    pub n_p: usize,
}

impl MetricReport {
    pub fn crci_at(&self, level: f64) -> Option<f64> {
        self.crci
            .iter()
            .find(|(l, _)| (l - level).abs() < 1e-9)
            .map(|(_, c)| *c)
    }
}

/// Mean absolute prediction error.
pub fn mape(predicted_means: &[f64], truth: &[f64]) -> Result<f64> {
    if predicted_means.len() != truth.len() {
        return Err(Error::LengthMismatch {
            what: "predicted means",
            got: predicted_means.len(),
            expected: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::invalid("mean absolute error needs at least one location"));
    }
    Ok(predicted_means
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t).abs())
        .sum::<f64>()
        / truth.len() as f64)
}

/// Coverage fraction of equal-tailed intervals at nominal level `level`
/// (calibration means the fraction lands near `level`).
pub fn crci(intervals: &[(f64, f64)], truth: &[f64], level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!(
            "coverage level must lie in (0,1), got {level}"
        )));
    }
    if intervals.len() != truth.len() {
        return Err(Error::LengthMismatch {
            what: "intervals",
            got: intervals.len(),
            expected: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::invalid("coverage needs at least one location"));
    }
    for &(lo, hi) in intervals {
        if lo > hi || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(format!("malformed interval [{lo}, {hi}]")));
        }
    }
    let covered = intervals
        .iter()
        .zip(truth)
        .filter(|((lo, hi), t)| *lo <= **t && **t <= *hi)
        .count();
    Ok(covered as f64 / truth.len() as f64)
}

/// Log posterior predictive density of one held-out truth under the
/// per-draw Gaussian mixture `(1/M) Σ_m N(y; mean_m, sd_m²)`, evaluated with
/// log-sum-exp and floored to stay finite however far the truth falls.
pub fn ppd(mean_draws: &[f64], sd_draws: &[f64], truth: f64) -> Result<f64> {
    if mean_draws.len() != sd_draws.len() {
        return Err(Error::LengthMismatch {
            what: "mixture sd draws",
            got: sd_draws.len(),
            expected: mean_draws.len(),
        });
    }
    if mean_draws.is_empty() {
        return Err(Error::invalid("predictive density needs at least one draw"));
    }
    let logs: Vec<f64> = mean_draws
        .iter()
        .zip(sd_draws)
        .map(|(m, s)| {
            let z = (truth - m) / s;
            -0.5 * z * z - s.ln() - LN_SQRT_2PI
        })
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Ok(PPD_FLOOR);
    }
    let sum: f64 = logs.iter().map(|l| (l - max).exp()).sum();
    let value = max + (sum / logs.len() as f64).ln();
    Ok(value.max(PPD_FLOOR))
}

/// Cross-validation fold layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvFolds {
    LeaveOneOut,
    KFold(usize),
}

/// Cross-validate a model by refitting on each training set and scoring the
/// held-out points: MAPE of the predictive mean, coverage at 90/95/99%, and
/// the summed log predictive density.
///
/// Folds are deterministic given the config seed; each fold's chain runs on
/// its own derived seed.
pub fn cross_validate(
    data: &GeoDataset,
    region: &Region,
    priors: &Priors,
    config: &McmcConfig,
    folds: CvFolds,
    model: ModelKind,
) -> Result<MetricReport> {
    let n = data.n();
    if n < 10 {
        return Err(Error::invalid(format!(
            "cross-validation needs at least 10 points, got {n}"
        )));
    }
    let fold_sets: Vec<Vec<usize>> = match folds {
        CvFolds::LeaveOneOut => (0..n).map(|i| vec![i]).collect(),
        CvFolds::KFold(k) => {
            if k < 2 || k > n {
                return Err(Error::invalid(format!("fold count {k} out of range")));
            }
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut derive_rng(config.seed, "cv-folds", 0));
            (0..k).map(|f| idx.iter().copied().skip(f).step_by(k).collect()).collect()
        }
    };

    let levels = [0.90, 0.95, 0.99];
    let mut abs_err = 0.0;
    let mut covered = [0usize; 3];
    let mut ppd_sum = 0.0;
    let mut n_p = 0usize;

    for (f, held) in fold_sets.iter().enumerate() {
        if held.len() >= n {
            return Err(Error::EmptyFold(f));
        }
        let train_idx: Vec<usize> = (0..n).filter(|i| !held.contains(i)).collect();
        let train = data.subset(&train_idx)?;
        let test = data.subset(held)?;

        let fold_config = McmcConfig {
            seed: derive_u64(config.seed, "cv-fold", f as u64),
            ..config.clone()
        };
        let samples = match model {
            ModelKind::Eps => run_eps(&train, region, priors, &fold_config)?,
            ModelKind::Nps => run_nps(&train, priors, &fold_config)?,
        };
        let grid = PredictionGrid::new(test.locations().to_vec(), None, region)?;
        let mixture = predictive_mixture(&samples, &train, &grid)?;

        for (j, &y_true) in test.y().iter().enumerate() {
            let means: Vec<f64> = mixture.y_mean.column(j).iter().copied().collect();
            let sds: Vec<f64> = mixture.y_sd.column(j).iter().copied().collect();
            let mean = means.iter().sum::<f64>() / means.len() as f64;
            abs_err += (mean - y_true).abs();
            ppd_sum += ppd(&means, &sds, y_true)?;
            for (li, &level) in levels.iter().enumerate() {
                let (lo, hi) = mixture_interval(&means, &sds, level);
                if lo <= y_true && y_true <= hi {
                    covered[li] += 1;
                }
            }
            n_p += 1;
        }
    }

    Ok(MetricReport {
        mape: abs_err / n_p as f64,
        crci: levels
            .iter()
            .zip(covered)
            .map(|(&l, c)| (l, c as f64 / n_p as f64))
            .collect(),
        ppd: Some(ppd_sum),
        n_p,
    })
}

/// Equal-tailed interval of a Gaussian mixture by bisection on its CDF.
pub fn mixture_interval(means: &[f64], sds: &[f64], level: f64) -> (f64, f64) {
    let alpha = 1.0 - level;
    (
        mixture_quantile(means, sds, alpha / 2.0),
        mixture_quantile(means, sds, 1.0 - alpha / 2.0),
    )
}

fn mixture_quantile(means: &[f64], sds: &[f64], q: f64) -> f64 {
    let cdf = |x: f64| {
        means
            .iter()
            .zip(sds)
            .map(|(m, s)| crate::normal::phi((x - m) / s))
            .sum::<f64>()
            / means.len() as f64
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (m, s) in means.iter().zip(sds) {
        lo = lo.min(m - 10.0 * s);
        hi = hi.max(m + 10.0 * s);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One distance bin of the empirical semivariogram with its permutation
/// envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct VariogramBin {
    pub center: f64,
    pub gamma: f64,
    pub lo: f64,
    pub hi: f64,
    pub pair_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariogramEnvelope {
    pub bins: Vec<VariogramBin>,
    /// Bins with no pairs, dropped from the output.
    pub dropped: usize,
}

/// Classical (Matheron) empirical semivariogram with a permutation envelope:
/// responses are shuffled over the fixed locations `n_permutations` times and
/// the per-bin min/max across shuffles bound what no spatial structure looks
/// like. Bin centers are equally spaced up to half the maximum pairwise
/// distance.
pub fn variogram_envelope<R: Rng + ?Sized>(
    data: &GeoDataset,
    n_bins: usize,
    n_permutations: usize,
    rng: &mut R,
) -> Result<VariogramEnvelope> {
    let n = data.n();
    if n < 10 {
        return Err(Error::invalid(format!("variogram needs at least 10 points, got {n}")));
    }
    if n_permutations < 99 {
        return Err(Error::invalid(format!(
            "envelope needs at least 99 permutations, got {n_permutations}"
        )));
    }
    if n_bins == 0 {
        return Err(Error::invalid("variogram needs at least one bin"));
    }

    let locs = data.locations();
    let mut max_dist: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            max_dist = max_dist.max(locs[i].dist(&locs[j]));
        }
    }
    let h_max = max_dist / 2.0;
    let width = h_max / n_bins as f64;

    // pair → bin assignment is fixed across permutations
    let mut pair_bins: Vec<(usize, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = locs[i].dist(&locs[j]);
            if d < h_max {
                pair_bins.push((i, j, (d / width) as usize));
            }
        }
    }

    let gamma_of = |values: &[f64]| -> (Vec<f64>, Vec<usize>) {
        let mut sums = vec![0.0f64; n_bins];
        let mut counts = vec![0usize; n_bins];
        for &(i, j, b) in &pair_bins {
            sums[b] += (values[i] - values[j]).powi(2);
            counts[b] += 1;
        }
        let gammas = sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| if c > 0 { s / (2.0 * c as f64) } else { f64::NAN })
            .collect();
        (gammas, counts)
    };

    let y: Vec<f64> = data.y().iter().copied().collect();
    let (observed, counts) = gamma_of(&y);

    let mut lo = vec![f64::INFINITY; n_bins];
    let mut hi = vec![f64::NEG_INFINITY; n_bins];
    let mut shuffled = y.clone();
    for _ in 0..n_permutations {
        shuffled.shuffle(rng);
        let (g, _) = gamma_of(&shuffled);
        for b in 0..n_bins {
            if g[b].is_finite() {
                lo[b] = lo[b].min(g[b]);
                hi[b] = hi[b].max(g[b]);
            }
        }
    }

    let mut bins = Vec::new();
    let mut dropped = 0;
    for b in 0..n_bins {
        if counts[b] == 0 {
            dropped += 1;
            continue;
        }
        bins.push(VariogramBin {
            center: (b as f64 + 0.5) * width,
            gamma: observed[b],
            lo: lo[b],
            hi: hi[b],
            pair_count: counts[b],
        });
    }
    Ok(VariogramEnvelope { bins, dropped })
}
