//! Observed geostatistical data: locations, responses, and covariates.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::region::Point;

/// Locations `x₁..x_n`, responses `y`, and the design matrix `D` whose first
/// column is the intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoDataset {
    locations: Vec<Point>,
    y: DVector<f64>,
    design: DMatrix<f64>,
}

impl GeoDataset {
    /// Build a dataset, assembling `D = [1 | covariates]`. Pass `None` for an
    /// intercept-only model.
    pub fn new(locations: Vec<Point>, y: Vec<f64>, covariates: Option<DMatrix<f64>>) -> Result<Self> {
        let n = locations.len();
        if y.len() != n {
            return Err(Error::LengthMismatch {
                what: "responses",
                got: y.len(),
                expected: n,
            });
        }
        let design = match covariates {
            None => DMatrix::from_element(n, 1, 1.0),
            Some(c) => {
                if c.nrows() != n {
                    return Err(Error::LengthMismatch {
                        what: "covariate rows",
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
        Ok(GeoDataset {
            locations,
            y: DVector::from_vec(y),
            design,
        })
    }

    pub fn n(&self) -> usize {
        self.locations.len()
    }

    /// Number of non-intercept covariates.
    pub fn p(&self) -> usize {
        self.design.ncols() - 1
    }

    pub fn locations(&self) -> &[Point] {
        &self.locations
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }

    /// Extract the rows with the given indices (used by cross-validation).
    pub fn subset(&self, idx: &[usize]) -> Result<GeoDataset> {
        for &i in idx {
            if i >= self.n() {
                return Err(Error::invalid(format!("subset index {i} out of range")));
            }
        }
        let locations: Vec<Point> = idx.iter().map(|&i| self.locations[i]).collect();
        let y: Vec<f64> = idx.iter().map(|&i| self.y[i]).collect();
        let covariates = if self.p() > 0 {
            let mut c = DMatrix::zeros(idx.len(), self.p());
            for (row, &i) in idx.iter().enumerate() {
                for j in 0..self.p() {
                    c[(row, j)] = self.design[(i, j + 1)];
                }
            }
            Some(c)
        } else {
            None
        };
        GeoDataset::new(locations, y, covariates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intercept_only_design() {
        let d = GeoDataset::new(
            vec![Point::new(0.1, 0.2), Point::new(0.3, 0.4)],
            vec![1.0, 2.0],
            None,
        )
        .unwrap();
        assert_eq!(d.p(), 0);
        assert_eq!(d.design().column(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 1.0]);
    }

    #[test]
    fn covariates_are_appended_after_intercept() {
        let c = DMatrix::from_column_slice(2, 1, &[5.0, 6.0]);
        let d = GeoDataset::new(
            vec![Point::new(0.1, 0.2), Point::new(0.3, 0.4)],
            vec![1.0, 2.0],
            Some(c),
        )
        .unwrap();
        assert_eq!(d.p(), 1);
        assert_eq!(d.design()[(1, 1)], 6.0);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(GeoDataset::new(vec![Point::new(0.0, 0.0)], vec![1.0, 2.0], None).is_err());
        let c = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        assert!(GeoDataset::new(vec![Point::new(0.0, 0.0)], vec![1.0], Some(c)).is_err());
    }

    #[test]
    fn subset_preserves_rows() {
        let c = DMatrix::from_column_slice(3, 1, &[5.0, 6.0, 7.0]);
        let d = GeoDataset::new(
            vec![Point::new(0.0, 0.0), Point::new(0.5, 0.5), Point::new(1.0, 1.0)],
            vec![1.0, 2.0, 3.0],
            Some(c),
        )
        .unwrap();
        let s = d.subset(&[2, 0]).unwrap();
        assert_eq!(s.n(), 2);
        assert_eq!(s.y()[0], 3.0);
        assert_eq!(s.design()[(0, 1)], 7.0);
        assert_eq!(s.locations()[1], Point::new(0.0, 0.0));
        assert!(d.subset(&[9]).is_err());
    }
}
