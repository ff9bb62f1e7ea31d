//! Shared helpers for the integration suites: KS distances, quadrature
//! CDFs, and simple chain statistics.

#![allow(dead_code)]

/// One-sample Kolmogorov-Smirnov distance against a reference CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(draws: &mut [f64], cdf: F) -> f64 {
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in draws.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Asymptotic KS critical value at the 1% level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Max deviation between the empirical CDF of `draws` and a reference CDF
/// evaluated on a fixed grid.
pub fn ks_against_grid(draws: &mut [f64], xs: &[f64], cdf: &[f64]) -> f64 {
    draws.sort_by(f64::total_cmp);
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let emp = draws.partition_point(|&v| v <= x) as f64 / draws.len() as f64;
        d = d.max((emp - cdf[i]).abs());
    }
    d
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Batch-means standard error for a correlated chain.
pub fn batch_se(xs: &[f64]) -> f64 {
    let b = 100.min(xs.len() / 2).max(2);
    let m = xs.len() / b;
    let means: Vec<f64> = (0..b)
        .map(|i| xs[i * m..(i + 1) * m].iter().sum::<f64>() / m as f64)
        .collect();
    let grand = mean(&means);
    let var = means.iter().map(|x| (x - grand).powi(2)).sum::<f64>() / (b - 1) as f64;
    (var / b as f64).sqrt()
}

/// Equal-tailed interval from unsorted draws.
pub fn credible_interval(xs: &[f64], level: f64) -> (f64, f64) {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let alpha = 1.0 - level;
    (
        quantile_sorted(&sorted, alpha / 2.0),
        quantile_sorted(&sorted, 1.0 - alpha / 2.0),
    )
}

pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
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
