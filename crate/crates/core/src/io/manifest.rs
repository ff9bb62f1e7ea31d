//! Run manifests: a flat key-value record written next to every output.
//!
//! The manifest is written with `status = running` before any work starts
//! and rewritten on completion, so an interrupted run leaves a partial
//! marker rather than nothing.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::inference::PosteriorSamples;

use super::parse_kv_lines;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Running,
    Ok,
    Error,
}

impl RunStatus {
    fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Running => "running",
            RunStatus::Ok => "ok",
            RunStatus::Error => "error",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: String,
    pub seed: u64,
    pub version: String,
    pub status: RunStatus,
    pub duration_secs: Option<f64>,
    /// Snapshot of the effective configuration, one entry per key.
    pub config: Vec<(String, String)>,
    /// MH acceptance rates, when the run produced chains.
    pub acceptance: Vec<(String, f64)>,
    /// (min, mean, max) of the augmented-process size across draws.
    pub k_summary: Option<(usize, f64, usize)>,
    pub error: Option<String>,
    #[doc(hidden)]
    pub started: Option<Instant>,
}

impl RunManifest {
    /// Start a manifest for a command; call [`RunManifest::write`]
    /// immediately to leave the running marker.
    pub fn begin(command: &str, seed: u64, version: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            seed,
            version: version.to_string(),
            status: RunStatus::Running,
            duration_secs: None,
            config: Vec::new(),
            acceptance: Vec::new(),
            k_summary: None,
            error: None,
            started: Some(Instant::now()),
        }
    }

    pub fn with_config(mut self, snapshot: &str) -> Self {
        for line in snapshot.lines() {
            if let Some((k, v)) = line.split_once('=') {
                self.config.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
        self
    }

    /// Attach chain diagnostics from a finished run.
    pub fn record_samples(&mut self, samples: &PosteriorSamples) {
        for (name, counter) in [
            ("sigma2", samples.accept_sigma2),
            ("phi", samples.accept_phi),
            ("beta", samples.accept_beta),
        ] {
            if let Some(rate) = counter.rate() {
                self.acceptance.push((name.to_string(), rate));
            }
        }
        self.k_summary = samples.k_summary();
    }

    pub fn finish_ok(&mut self) {
        self.status = RunStatus::Ok;
        self.duration_secs = self.started.map(|s| s.elapsed().as_secs_f64());
    }

    pub fn finish_error(&mut self, message: &str) {
        self.status = RunStatus::Error;
        self.error = Some(message.to_string());
        self.duration_secs = self.started.map(|s| s.elapsed().as_secs_f64());
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        push("status", self.status.as_str().to_string());
        push("command", self.command.clone());
        push("seed", self.seed.to_string());
        push("version", self.version.clone());
        if let Some(d) = self.duration_secs {
            push("duration_secs", format!("{d:.3}"));
        }
        if let Some(e) = &self.error {
            push("error", e.replace('\n', " "));
        }
        for (name, rate) in &self.acceptance {
            push(&format!("accept.{name}"), format!("{rate:.4}"));
        }
        if let Some((min, mean, max)) = self.k_summary {
            push("k.min", min.to_string());
            push("k.mean", format!("{mean:.2}"));
            push("k.max", max.to_string());
        }
        for (k, v) in &self.config {
            push(&format!("config.{k}"), v.clone());
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

/// Manifest path next to an output file: `<stem>_manifest.txt`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default();
    out.with_file_name(format!("{stem}_manifest.txt"))
}

/// Read back the key-value pairs of a manifest.
pub fn read_manifest(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let label = path.display().to_string();
    parse_kv_lines(&text, &label)
        .map(|kvs| kvs.into_iter().map(|(k, v, _)| (k, v)).collect())
        .map_err(|e| match e {
            Error::Parse { .. } => e,
            other => other,
        })
}
