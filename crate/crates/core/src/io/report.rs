//! Metric reports as flat key-value text.

use std::path::Path;

use crate::error::Result;
use crate::evaluation::MetricReport;

pub fn render_report(report: &MetricReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("n_p = {}\n", report.n_p));
    out.push_str(&format!("mape = {}\n", report.mape));
    match report.ppd {
        Some(ppd) => out.push_str(&format!("ppd = {ppd}\n")),
        None => out.push_str("ppd = unavailable\n"),
    }
    for (level, coverage) in &report.crci {
        let pct = (level * 100.0).round() as i64;
        out.push_str(&format!("crci.{pct} = {coverage}\n"));
    }
    out
}

pub fn write_report(path: &Path, report: &MetricReport) -> Result<()> {
    std::fs::write(path, render_report(report))?;
    Ok(())
}
