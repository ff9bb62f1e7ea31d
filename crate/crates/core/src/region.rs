//! The rectangular study window and uniform sampling within it.

use rand::Rng;

use crate::error::{is_positive, Error, Result};

/// A planar location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Euclidean distance to `other`.
    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// An axis-aligned rectangular study window.
///
/// The model mathematics only ever needs the window's area and uniform draws
/// inside it, so rectangles are all that is supported. Irregular survey
/// outlines should be pre-scaled into a bounding rectangle by the caller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    lower: [f64; 2],
    upper: [f64; 2],
}

impl Region {
    /// Build a window from opposite corners. Fails unless `upper > lower`
    /// strictly in both coordinates.
    pub fn new(lower: [f64; 2], upper: [f64; 2]) -> Result<Self> {
        for d in 0..2 {
            if !is_positive(upper[d] - lower[d]) || !lower[d].is_finite() {
                return Err(Error::invalid(format!(
                    "region must satisfy upper > lower in every coordinate, got {lower:?}..{upper:?}"
                )));
            }
        }
        Ok(Region { lower, upper })
    }

    /// The unit square `[0,1]²`, the conventional window for simulations.
    pub fn unit_square() -> Self {
        Region {
            lower: [0.0, 0.0],
            upper: [1.0, 1.0],
        }
    }

    pub fn lower(&self) -> [f64; 2] {
        self.lower
    }

    pub fn upper(&self) -> [f64; 2] {
        self.upper
    }

    /// The window's area (its 2-d volume).
    pub fn area(&self) -> f64 {
        (self.upper[0] - self.lower[0]) * (self.upper[1] - self.lower[1])
    }

    /// Length of the window diagonal.
    pub fn diameter(&self) -> f64 {
        (self.upper[0] - self.lower[0]).hypot(self.upper[1] - self.lower[1])
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.lower[0] && p.x <= self.upper[0] && p.y >= self.lower[1] && p.y <= self.upper[1]
    }

    /// Draw `count` points i.i.d. uniformly over the window, strictly inside
    /// its boundary.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<Point> {
        (0..count)
            .map(|_| {
                Point::new(
                    self.sample_axis(0, rng),
                    self.sample_axis(1, rng),
                )
            })
            .collect()
    }

    fn sample_axis<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> f64 {
        // `random_range` is half-open; reject the measure-zero boundary hits
        // so every point is strictly interior.
        loop {
            let v = rng.random_range(self.lower[d]..self.upper[d]);
            if v > self.lower[d] {
                return v;
            }
        }
    }

    /// Centers of a regular `nx × ny` grid of cells tiling the window.
    pub fn grid_centers(&self, nx: usize, ny: usize) -> Vec<Point> {
        let wx = (self.upper[0] - self.lower[0]) / nx as f64;
        let wy = (self.upper[1] - self.lower[1]) / ny as f64;
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                out.push(Point::new(
                    self.lower[0] + (i as f64 + 0.5) * wx,
                    self.lower[1] + (j as f64 + 0.5) * wy,
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use proptest::prelude::*;

    #[test]
    fn area_of_simple_rectangles() {
        assert_eq!(Region::unit_square().area(), 1.0);
        assert_eq!(Region::new([0.0, 0.0], [2.0, 3.0]).unwrap().area(), 6.0);
        assert_eq!(Region::new([0.0, 0.0], [0.5, 0.5]).unwrap().area(), 0.25);
    }

    #[test]
    fn degenerate_windows_rejected() {
        assert!(Region::new([0.0, 0.0], [0.0, 1.0]).is_err());
        assert!(Region::new([1.0, 0.0], [0.0, 1.0]).is_err());
        assert!(Region::new([0.0, 0.0], [f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn empty_draw() {
        let mut rng = derive_rng(1, "region", 0);
        assert!(Region::unit_square().sample_uniform(0, &mut rng).is_empty());
    }

    #[test]
    fn uniform_draw_moments() {
        let region = Region::unit_square();
        let mut rng = derive_rng(1, "region-moments", 0);
        let pts = region.sample_uniform(10_000, &mut rng);
        let mean_x: f64 = pts.iter().map(|p| p.x).sum::<f64>() / pts.len() as f64;
        let mean_y: f64 = pts.iter().map(|p| p.y).sum::<f64>() / pts.len() as f64;
        // 3σ/√n CLT bound with σ = 1/√12
        assert!((mean_x - 0.5).abs() < 0.015, "mean_x = {mean_x}");
        assert!((mean_y - 0.5).abs() < 0.015, "mean_y = {mean_y}");
        let left = pts.iter().filter(|p| p.x <= 0.5).count() as f64 / pts.len() as f64;
        assert!((left - 0.5).abs() < 0.015, "left fraction = {left}");
    }

    #[test]
    fn uniformity_chi_square_4x4() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let region = Region::unit_square();
        let mut rng = derive_rng(2, "region-chi2", 0);
        let pts = region.sample_uniform(10_000, &mut rng);
        let mut counts = [0usize; 16];
        for p in &pts {
            let i = ((p.x * 4.0) as usize).min(3);
            let j = ((p.y * 4.0) as usize).min(3);
            counts[4 * j + i] += 1;
        }
        let expected = pts.len() as f64 / 16.0;
        let stat: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let crit = ChiSquared::new(15.0).unwrap().inverse_cdf(0.99);
        assert!(stat < crit, "chi2 = {stat}, critical = {crit}");
    }

    #[test]
    fn grid_centers_unit_square_2x2() {
        let g = Region::unit_square().grid_centers(2, 2);
        assert_eq!(g.len(), 4);
        assert_eq!(g[0], Point::new(0.25, 0.25));
        assert_eq!(g[3], Point::new(0.75, 0.75));
    }

    proptest! {
        #[test]
        fn sampled_points_stay_inside(
            seed in 0u64..1000,
            count in 0usize..200,
            w in 0.1f64..10.0,
            h in 0.1f64..10.0,
            ox in -5.0f64..5.0,
            oy in -5.0f64..5.0,
        ) {
            let region = Region::new([ox, oy], [ox + w, oy + h]).unwrap();
            let mut rng = derive_rng(seed, "region-prop", 0);
            for p in region.sample_uniform(count, &mut rng) {
                prop_assert!(region.contains(&p));
            }
        }
    }
}
