//! Structured result emission: text, line-delimited JSON, or CSV.

use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;

use crate::format::{format_complex, format_f64};
use cvsim::Complex64;

/// Render a report value as JSON: integer, float, bool, or string.
fn json_scalar(v: &str) -> serde_json::Value {
    if let Ok(i) = v.parse::<i64>() {
        return serde_json::Value::Number(i.into());
    }
    if let Ok(x) = v.parse::<f64>() {
        if let Some(n) = serde_json::Number::from_f64(x) {
            return serde_json::Value::Number(n);
        }
    }
    if let Ok(b) = v.parse::<bool>() {
        return serde_json::Value::Bool(b);
    }
    serde_json::Value::String(v.to_string())
}

/// Print a line to stdout, treating a broken pipe as a normal early exit
/// (so `cvsim ... | head` terminates quietly).
fn line(text: impl AsRef<str>) {
    let mut stdout = std::io::stdout().lock();
    if writeln!(stdout, "{}", text.as_ref()).is_err() {
        std::process::exit(0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

/// One probability record, one line per alpha point.
#[derive(Debug, Serialize)]
pub struct ProbabilityRecord {
    pub alpha: Vec<String>,
    pub probability: f64,
    pub error_bound: f64,
    pub backend: String,
}

impl ProbabilityRecord {
    pub fn new(alphas: &[Complex64], probability: f64, error_bound: f64, backend: &str) -> Self {
        ProbabilityRecord {
            alpha: alphas.iter().map(|a| format_complex(*a)).collect(),
            probability,
            error_bound,
            backend: backend.to_string(),
        }
    }
}

pub fn emit_probability_records(format: OutputFormat, records: &[ProbabilityRecord]) {
    match format {
        OutputFormat::Text => {
            for r in records {
                line(format!(
                    "alpha=({}) probability={} error_bound={} backend={}",
                    r.alpha.join(", "),
                    format_f64(r.probability),
                    format_f64(r.error_bound),
                    r.backend
                ));
            }
        }
        OutputFormat::Json => {
            for r in records {
                line(serde_json::to_string(r).expect("record serializes"));
            }
        }
        OutputFormat::Csv => {
            line("alpha,probability,error_bound,backend");
            for r in records {
                line(format!(
                    "{},{},{},{}",
                    r.alpha.join(" "),
                    format_f64(r.probability),
                    format_f64(r.error_bound),
                    r.backend
                ));
            }
        }
    }
}

/// Key-value report (bounds, estimate, decompose headers). Text prints
/// `key = value` lines; JSON prints one object; CSV prints a two-column table.
pub fn emit_report(format: OutputFormat, pairs: &[(&str, String)]) {
    match format {
        OutputFormat::Text => {
            for (k, v) in pairs {
                line(format!("{k} = {v}"));
            }
        }
        OutputFormat::Json => {
            let map: serde_json::Map<String, serde_json::Value> = pairs
                .iter()
                .map(|(k, v)| (k.to_string(), json_scalar(v)))
                .collect();
            line(serde_json::Value::Object(map).to_string());
        }
        OutputFormat::Csv => {
            line("key,value");
            for (k, v) in pairs {
                line(format!("{k},{v}"));
            }
        }
    }
}

/// Table emission for branch listings and comparisons.
pub fn emit_table(format: OutputFormat, header: &[&str], rows: &[Vec<String>]) {
    match format {
        OutputFormat::Text => {
            line(header.join("  "));
            for row in rows {
                line(row.join("  "));
            }
        }
        OutputFormat::Json => {
            for row in rows {
                let map: serde_json::Map<String, serde_json::Value> = header
                    .iter()
                    .zip(row)
                    .map(|(k, v)| (k.to_string(), json_scalar(v)))
                    .collect();
                line(serde_json::Value::Object(map).to_string());
            }
        }
        OutputFormat::Csv => {
            line(header.join(","));
            for row in rows {
                line(row.join(","));
            }
        }
    }
}
