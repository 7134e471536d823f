use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::elbow::ElbowCurve;
use crate::error::{Error, Result};

/// Fixed CSV header.
pub const CSV_HEADER: [&str; 7] = [
    "dataset",
    "initialization",
    "avg_nik",
    "init_time_s",
    "compute_time_s",
    "total_time_s",
    "avg_sse",
];

/// One initializer's averages over a dataset's images.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub dataset: String,
    pub initialization: String,
    #[serde(with = "nan_as_null")]
    pub avg_nik: f64,
    /// Mean initialisation time, seconds.
    #[serde(with = "nan_as_null")]
    pub init_time: f64,
    /// Mean time to convergence, seconds.
    #[serde(with = "nan_as_null")]
    pub compute_time: f64,
    /// `init_time + compute_time`.
    #[serde(with = "nan_as_null")]
    pub total_time: f64,
    #[serde(with = "nan_as_null")]
    pub avg_sse: f64,
    /// Images contributing to the averages.
    pub images_used: usize,
    /// One note per image excluded because the method failed on it.
    #[serde(default)]
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub clock_source: String,
    pub timestamp: String,
    pub config_hash: String,
    /// Columns that vary between identical runs.
    pub nondeterministic_fields: Vec<String>,
    pub threads: usize,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetElbow {
    pub dataset: String,
    pub image: String,
    pub curve: ElbowCurve,
    pub suggested_k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub metadata: RunMetadata,
    #[serde(default)]
    pub elbows: Vec<DatasetElbow>,
}

impl BenchReport {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Report(format!("invalid report json: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(format!("unknown report format {s:?} (csv, json, markdown)")),
        }
    }
}

/// Render `x` with `digits` significant digits, `%g`-style: trailing zeros
/// dropped, scientific notation outside `1e-4 <= |x| < 10^digits`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        format!("{mantissa}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn sig(x: f64) -> String {
    format_sig(x, 6)
}

/// Serialise a report as CSV, JSON or a Markdown table.
///
/// CSV and Markdown print reals with 6 significant digits; JSON keeps full
/// precision so it parses back to identical rows.
pub fn emit_report(report: &BenchReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Csv => emit_csv(report),
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serialises");
            out.push(b'\n');
            out
        }
        ReportFormat::Markdown => emit_markdown(report).into_bytes(),
    }
}

fn emit_csv(report: &BenchReport) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("in-memory write");
    for r in &report.rows {
        writer
            .write_record([
                r.dataset.clone(),
                r.initialization.clone(),
                sig(r.avg_nik),
                sig(r.init_time),
                sig(r.compute_time),
                sig(r.total_time),
                sig(r.avg_sse),
            ])
            .expect("in-memory write");
    }
    writer.into_inner().expect("in-memory flush")
}

fn emit_markdown(report: &BenchReport) -> String {
    let mut out = String::new();
    out.push_str("| Dataset | Initialization | Avg. NIK | Init Time (s) | Compute Time (s) | Total Time (s) | SSE |\n");
    out.push_str("|:--|:--|--:|--:|--:|--:|--:|\n");
    let mut previous: Option<&str> = None;
    for r in &report.rows {
        let dataset = if previous == Some(r.dataset.as_str()) {
            ""
        } else {
            r.dataset.as_str()
        };
        previous = Some(&r.dataset);
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} |",
            dataset.replace('|', "\\|"),
            r.initialization.replace('|', "\\|"),
            sig(r.avg_nik),
            sig(r.init_time),
            sig(r.compute_time),
            sig(r.total_time),
            sig(r.avg_sse),
        );
    }
    let notes: Vec<&BenchRow> = report
        .rows
        .iter()
        .filter(|r| !r.failures.is_empty())
        .collect();
    if !notes.is_empty() {
        out.push('\n');
        for r in notes {
            let _ = writeln!(
                out,
                "- {} / {}: {} image(s) excluded",
                r.dataset,
                r.initialization,
                r.failures.len()
            );
            for f in &r.failures {
                let _ = writeln!(out, "  - {f}");
            }
        }
    }
    for e in &report.elbows {
        let _ = writeln!(
            out,
            "\nElbow ({}, {}): suggested k = {}",
            e.dataset,
            e.curve.seeding_used,
            e.suggested_k.map_or("none".to_string(), |k| k.to_string())
        );
    }
    out
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}
