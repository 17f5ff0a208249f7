//! Report emission: a CSV trial table and a JSON aggregate.
//!
//! Column order is a stable contract. Floats are written with 17
//! significant digits (`{:.16e}`), which round-trips f64 exactly; the JSON
//! side uses serde_json's shortest-round-trip encoding, which is equally
//! lossless. Identical configs produce byte-identical files.

use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::harness::{AggregateReport, TrialRecord};

pub const CSV_HEADER: &str = "trial_index,seed,n,k,c,smin_G_sq,smax_GammaJ,tail_correction,a_k,\
beta_prime,cert_eq2,wc_sq,wc_exact,claim1_pass,claim2_pass,theorem_pass,rank";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn fmt_opt_bool(b: Option<bool>) -> String {
    b.map(|v| v.to_string()).unwrap_or_default()
}

fn record_row(r: &TrialRecord) -> String {
    [
        r.trial_index.to_string(),
        r.seed.to_string(),
        r.n.to_string(),
        r.k.to_string(),
        fmt_f64(r.c),
        fmt_f64(r.smin_g_sq),
        fmt_f64(r.smax_gamma_j),
        fmt_f64(r.tail_correction),
        fmt_f64(r.a_k),
        fmt_opt_f64(r.beta_prime),
        fmt_f64(r.cert_eq2),
        fmt_opt_f64(r.wc_sq),
        fmt_opt_bool(r.wc_exact),
        fmt_opt_bool(r.claim1_pass),
        fmt_opt_bool(r.claim2_pass),
        fmt_opt_bool(r.theorem_pass),
        r.rank.to_string(),
    ]
    .join(",")
}

/// The CSV trial table (header plus one row per record, trailing newline).
pub fn render_csv(report: &AggregateReport) -> String {
    let mut out = String::with_capacity(128 * (report.records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &report.records {
        out.push_str(&record_row(r));
        out.push('\n');
    }
    out
}

/// The JSON aggregate with config echo (trial rows live in the CSV).
pub fn render_json(report: &AggregateReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

/// Write the report in the requested format.
pub fn emit_report(
    report: &AggregateReport,
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let payload = match format {
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Json => render_json(report)?,
    };
    let mut file = std::fs::File::create(path)?;
    file.write_all(payload.as_bytes())?;
    Ok(())
}
