//! Prediction tables: long-format CSV, one row per grid location, columns
//! `x1,x2,mean,median` plus `lo<pct>,hi<pct>` per interval level.

use std::path::Path;

use crate::error::{Error, Result};
use crate::prediction::{IntervalSummary, PredictiveField};
use crate::region::Point;

use super::csv_error_mapper;

fn pct_label(level: f64) -> String {
    let pct = level * 100.0;
    if (pct - pct.round()).abs() < 1e-9 {
        format!("{}", pct.round() as i64)
    } else {
        format!("{pct}")
    }
}

pub fn write_prediction(path: &Path, field: &PredictiveField) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec![
        "x1".to_string(),
        "x2".to_string(),
        "mean".to_string(),
        "median".to_string(),
    ];
    for s in &field.intervals {
        header.push(format!("lo{}", pct_label(s.level)));
        header.push(format!("hi{}", pct_label(s.level)));
    }
    w.write_record(&header).map_err(csv_error_mapper(path))?;
    for (j, p) in field.locations.iter().enumerate() {
        let mut row = vec![
            p.x.to_string(),
            p.y.to_string(),
            field.mean[j].to_string(),
            field.median[j].to_string(),
        ];
        for s in &field.intervals {
            row.push(s.lower[j].to_string());
            row.push(s.upper[j].to_string());
        }
        w.write_record(&row).map_err(csv_error_mapper(path))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_prediction(path: &Path) -> Result<PredictiveField> {
    let label = path.display().to_string();
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r
        .headers()
        .map_err(csv_error_mapper(path))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let expected = ["x1", "x2", "mean", "median"];
    if header.len() < 4 || header[..4] != expected {
        return Err(Error::Parse {
            path: label,
            line: 1,
            msg: "expected header starting `x1,x2,mean,median`".to_string(),
        });
    }
    let mut levels = Vec::new();
    let mut col = 4;
    while col + 1 < header.len() + 1 && col < header.len() {
        let lo = &header[col];
        if let Some(p) = lo.strip_prefix("lo") {
            let level: f64 = p.parse().map_err(|_| Error::Parse {
                path: label.clone(),
                line: 1,
                msg: format!("bad interval column `{lo}`"),
            })?;
            levels.push(level / 100.0);
            col += 2;
        } else {
            return Err(Error::Parse {
                path: label,
                line: 1,
                msg: format!("unexpected column `{lo}`"),
            });
        }
    }

    let mut field = PredictiveField {
        locations: Vec::new(),
        mean: Vec::new(),
        median: Vec::new(),
        intervals: levels
            .iter()
            .map(|&level| IntervalSummary {
                level,
                lower: Vec::new(),
                upper: Vec::new(),
            })
            .collect(),
    };
    for (idx, record) in r.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(csv_error_mapper(path))?;
        let parse = |j: usize| -> Result<f64> {
            record[j].parse().map_err(|_| Error::Parse {
                path: label.clone(),
                line,
                msg: format!("could not parse `{}`", &record[j]),
            })
        };
        field.locations.push(Point::new(parse(0)?, parse(1)?));
        field.mean.push(parse(2)?);
        field.median.push(parse(3)?);
        for (li, s) in field.intervals.iter_mut().enumerate() {
            s.lower.push(parse(4 + 2 * li)?);
            s.upper.push(parse(5 + 2 * li)?);
        }
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let field = PredictiveField {
            locations: vec![Point::new(0.25, 0.25), Point::new(0.75, 0.75)],
            mean: vec![4.1, 3.9],
            median: vec![4.05, 3.88],
            intervals: vec![
                IntervalSummary {
                    level: 0.9,
                    lower: vec![3.0, 2.9],
                    upper: vec![5.2, 5.0],
                },
                IntervalSummary {
                    level: 0.95,
                    lower: vec![2.8, 2.7],
                    upper: vec![5.5, 5.3],
                },
            ],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pred.csv");
        write_prediction(&path, &field).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x1,x2,mean,median,lo90,hi90,lo95,hi95"));
        let back = read_prediction(&path).unwrap();
        assert_eq!(field, back);
    }
}
