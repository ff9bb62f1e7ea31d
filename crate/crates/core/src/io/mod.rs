//! File formats behind the command-line tool: CSV datasets, posterior
//! draws with latent sidecars, prediction tables, flat-file configs, metric
//! reports, and run manifests.
//!
//! Numeric fields serialize through Rust's shortest-round-trip float
//! formatting, so parse(write(x)) reproduces every value bit-exactly.

mod config;
mod dataset;
mod draws;
mod manifest;
mod prediction_io;
mod report;

pub use config::{parse_fit_config, render_fit_config, FitSettings};
pub use dataset::{read_dataset, write_dataset};
pub use draws::{discarded_path, latent_path, read_draws, write_draws};
pub use manifest::{manifest_path, read_manifest, RunManifest, RunStatus};
pub use prediction_io::{read_prediction, write_prediction};
pub use report::{render_report, write_report};

use std::path::Path;

use crate::error::{Error, Result};

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let msg = e.to_string();
        if let csv::ErrorKind::Io(io) = e.into_kind() {
            Error::Io(io)
        } else {
            Error::Config(msg)
        }
    }
}

/// Map record-level CSV errors to line-numbered parse errors.
pub(crate) fn csv_error_mapper(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io(std::io::Error::other(e.to_string())),
        _ => Error::Parse {
            path: path.display().to_string(),
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            msg: e.to_string(),
        },
    }
}

/// Parse `key = value` lines, skipping blanks and `#` comments. Returns
/// `(key, value, line_number)` triples.
pub(crate) fn parse_kv_lines(text: &str, path: &str) -> Result<Vec<(String, String, usize)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: path.to_string(),
                line: idx + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            });
        };
        out.push((key.trim().to_string(), value.trim().to_string(), idx + 1));
    }
    Ok(out)
}

pub(crate) fn parse_number<T: std::str::FromStr>(
    value: &str,
    key: &str,
    path: &str,
    line: usize,
) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        path: path.to_string(),
        line,
        msg: format!("could not parse `{value}` for key `{key}`"),
    })
}
