//! Dataset CSV: header `x1,x2,y[,d1..dp]`, one row per observation.

use std::path::Path;

use nalgebra::DMatrix;

use crate::data::GeoDataset;
use crate::error::{Error, Result};
use crate::region::Point;

use super::csv_error_mapper as csv_err;

pub fn write_dataset(path: &Path, data: &GeoDataset) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["x1".to_string(), "x2".to_string(), "y".to_string()];
    for j in 1..=data.p() {
        header.push(format!("d{j}"));
    }
    w.write_record(&header).map_err(csv_err(path))?;
    for (i, loc) in data.locations().iter().enumerate() {
        let mut row = vec![loc.x.to_string(), loc.y.to_string(), data.y()[i].to_string()];
        for j in 1..=data.p() {
            row.push(data.design()[(i, j)].to_string());
        }
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset(path: &Path) -> Result<GeoDataset> {
    let label = path.display().to_string();
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    if header.len() < 3 || &header[0] != "x1" || &header[1] != "x2" || &header[2] != "y" {
        return Err(Error::Parse {
            path: label,
            line: 1,
            msg: format!("expected header starting `x1,x2,y`, got `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let p = header.len() - 3;

    let mut locations = Vec::new();
    let mut ys = Vec::new();
    let mut covs: Vec<f64> = Vec::new();
    for (idx, record) in r.records().enumerate() {
        let line = idx + 2; // header is line 1
        let record = record.map_err(csv_err(path))?;
        if record.len() != header.len() {
            return Err(Error::Parse {
                path: label,
                line,
                msg: format!("expected {} fields, got {}", header.len(), record.len()),
            });
        }
        let field = |j: usize| -> Result<f64> {
            record[j].trim().parse().map_err(|_| Error::Parse {
                path: label.clone(),
                line,
                msg: format!("could not parse `{}` in column `{}`", &record[j], &header[j]),
            })
        };
        locations.push(Point::new(field(0)?, field(1)?));
        ys.push(field(2)?);
        for j in 0..p {
            covs.push(field(3 + j)?);
        }
    }
    let covariates = (p > 0).then(|| DMatrix::from_row_iterator(locations.len(), p, covs));
    GeoDataset::new(locations, ys, covariates)
}
