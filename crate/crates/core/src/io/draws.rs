//! Posterior draws CSV plus latent sidecars.
//!
//! The main file holds one row per retained draw. The preferential model
//! writes `iteration,lambda_star,eta0..,tau2,sigma2,phi,beta,k`; the
//! baseline drops the columns its schema does not have. Field values at the
//! data locations go to `<stem>_latent.csv` keyed by draw index; when
//! full-latent storage was on, discarded points go to
//! `<stem>_discarded.csv` in long format.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::inference::{AcceptCounter, Draw, ModelKind, PosteriorSamples};
use crate::region::Point;

use super::csv_error_mapper;

/// Sidecar path for the per-draw field values at the data locations.
pub fn latent_path(draws_path: &Path) -> PathBuf {
    sibling(draws_path, "_latent.csv")
}

/// Sidecar path for the per-draw discarded points (full-latent mode only).
pub fn discarded_path(draws_path: &Path) -> PathBuf {
    sibling(draws_path, "_discarded.csv")
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn write_draws(path: &Path, samples: &PosteriorSamples) -> Result<()> {
    let eps = samples.model == ModelKind::Eps;
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["iteration".to_string()];
    if eps {
        header.push("lambda_star".into());
    }
    for j in 0..=samples.p {
        header.push(format!("eta{j}"));
    }
    header.extend(["tau2".into(), "sigma2".into(), "phi".into()]);
    if eps {
        header.push("beta".into());
        header.push("k".into());
    }
    w.write_record(&header).map_err(csv_error_mapper(path))?;
    for d in &samples.draws {
        let mut row = vec![d.iteration.to_string()];
        if eps {
            row.push(d.lambda_star.unwrap().to_string());
        }
        for e in &d.eta {
            row.push(e.to_string());
        }
        row.push(d.tau2.to_string());
        row.push(d.sigma2.to_string());
        row.push(d.phi.to_string());
        if eps {
            row.push(d.beta.unwrap().to_string());
            row.push(d.k.to_string());
        }
        w.write_record(&row).map_err(csv_error_mapper(path))?;
    }
    w.flush()?;

    // field values at the data locations, keyed by draw index
    let lpath = latent_path(path);
    let mut lw = csv::Writer::from_path(&lpath)?;
    let mut header = vec!["draw".to_string()];
    for i in 1..=samples.n_data {
        header.push(format!("s{i}"));
    }
    lw.write_record(&header).map_err(csv_error_mapper(&lpath))?;
    for (idx, d) in samples.draws.iter().enumerate() {
        let mut row = vec![idx.to_string()];
        row.extend(d.s_data.iter().map(|v| v.to_string()));
        lw.write_record(&row).map_err(csv_error_mapper(&lpath))?;
    }
    lw.flush()?;

    if samples.draws.iter().any(|d| d.discarded.is_some()) {
        let dpath = discarded_path(path);
        let mut dw = csv::Writer::from_path(&dpath)?;
        dw.write_record(["draw", "x1", "x2", "s"]).map_err(csv_error_mapper(&dpath))?;
        for (idx, d) in samples.draws.iter().enumerate() {
            if let Some((locs, s)) = &d.discarded {
                for (p, v) in locs.iter().zip(s) {
                    dw.write_record([
                        idx.to_string(),
                        p.x.to_string(),
                        p.y.to_string(),
                        v.to_string(),
                    ])
                    .map_err(csv_error_mapper(&dpath))?;
                }
            }
        }
        dw.flush()?;
    }
    Ok(())
}

pub fn read_draws(path: &Path) -> Result<PosteriorSamples> {
    let label = path.display().to_string();
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r
        .headers()
        .map_err(csv_error_mapper(path))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let eps = header.iter().any(|h| h == "lambda_star");
    let p = header.iter().filter(|h| h.starts_with("eta")).count().saturating_sub(1);
    let col = |name: &str| header.iter().position(|h| h == name);
    let need = |name: &str| {
        col(name).ok_or_else(|| Error::Parse {
            path: label.clone(),
            line: 1,
            msg: format!("draws file is missing column `{name}`"),
        })
    };
    let c_iter = need("iteration")?;
    let c_tau2 = need("tau2")?;
    let c_sigma2 = need("sigma2")?;
    let c_phi = need("phi")?;
    let c_eta0 = need("eta0")?;

    let mut draws = Vec::new();
    for (idx, record) in r.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(csv_error_mapper(path))?;
        let parse = |j: usize| -> Result<f64> {
            record[j].parse().map_err(|_| Error::Parse {
                path: label.clone(),
                line,
                msg: format!("could not parse `{}` in column `{}`", &record[j], header[j]),
            })
        };
        let eta: Vec<f64> = (0..=p).map(|j| parse(c_eta0 + j)).collect::<Result<_>>()?;
        draws.push(Draw {
            iteration: parse(c_iter)? as u64,
            lambda_star: if eps { Some(parse(need("lambda_star")?)?) } else { None },
            eta,
            tau2: parse(c_tau2)?,
            sigma2: parse(c_sigma2)?,
            phi: parse(c_phi)?,
            beta: if eps { Some(parse(need("beta")?)?) } else { None },
            k: if eps { parse(need("k")?)? as usize } else { 0 },
            s_data: Vec::new(),
            discarded: None,
        });
    }

    // attach the latent sidecar
    let lpath = latent_path(path);
    let mut n_data = 0;
    if lpath.exists() {
        let mut lr = csv::Reader::from_path(&lpath)?;
        n_data = lr.headers().map_err(csv_error_mapper(&lpath))?.len() - 1;
        for (idx, record) in lr.records().enumerate() {
            let record = record.map_err(csv_error_mapper(&lpath))?;
            if idx >= draws.len() {
                break;
            }
            draws[idx].s_data = (1..record.len())
                .map(|j| {
                    record[j].parse().map_err(|_| Error::Parse {
                        path: lpath.display().to_string(),
                        line: idx + 2,
                        msg: format!("could not parse latent value `{}`", &record[j]),
                    })
                })
                .collect::<Result<_>>()?;
        }
    }

    // attach the discarded sidecar when present
    let dpath = discarded_path(path);
    if dpath.exists() {
        for d in draws.iter_mut() {
            d.discarded = Some((Vec::new(), Vec::new()));
        }
        let mut dr = csv::Reader::from_path(&dpath)?;
        for record in dr.records() {
            let record = record.map_err(csv_error_mapper(&dpath))?;
            let idx: usize = record[0].parse().map_err(|_| Error::Parse {
                path: dpath.display().to_string(),
                line: 0,
                msg: format!("bad draw index `{}`", &record[0]),
            })?;
            if let Some(d) = draws.get_mut(idx) {
                let parse = |j: usize| -> Result<f64> {
                    record[j].parse().map_err(|_| Error::Parse {
                        path: dpath.display().to_string(),
                        line: 0,
                        msg: format!("could not parse `{}`", &record[j]),
                    })
                };
                let (locs, s) = d.discarded.as_mut().unwrap();
                locs.push(Point::new(parse(1)?, parse(2)?));
                s.push(parse(3)?);
            }
        }
    }

    for d in draws.iter_mut() {
        if !eps {
            d.k = n_data;
        }
    }
    Ok(PosteriorSamples {
        model: if eps { ModelKind::Eps } else { ModelKind::Nps },
        n_data,
        p,
        draws,
        accept_sigma2: AcceptCounter::default(),
        accept_phi: AcceptCounter::default(),
        accept_beta: AcceptCounter::default(),
    })
}
