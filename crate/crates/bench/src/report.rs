use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use shs_core::centrality::Metrics;

use crate::error::{BenchError, Result};
use crate::manifest::sha256_bytes;

/// One (dataset, method, k) cell of a benchmark table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub dataset: String,
    pub method: String,
    pub seed: u64,
    pub k_percent: f64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub overlap: f64,
    /// Graph loading, betweenness and feature extraction for the dataset.
    pub prepare_seconds: f64,
    pub train_seconds: f64,
    /// Feature extraction on the evaluated graph (GraphSHS and meta rows).
    pub feature_seconds: f64,
    /// Time to produce the labels; includes `feature_seconds` only when the
    /// run was configured to include features.
    pub infer_seconds: f64,
    /// Slowest baseline's `infer_seconds` divided by this row's. Empty for
    /// rows with no measurable inference time.
    pub speedup: Option<f64>,
}

impl ReportRow {
    pub fn new(dataset: &str, method: &str, seed: u64, k_percent: f64, metrics: Metrics) -> Self {
        ReportRow {
            dataset: dataset.to_string(),
            method: method.to_string(),
            seed,
            k_percent,
            accuracy: metrics.accuracy,
            precision: metrics.precision,
            recall: metrics.recall,
            f1: metrics.f1,
            overlap: metrics.overlap,
            prepare_seconds: 0.0,
            train_seconds: 0.0,
            feature_seconds: 0.0,
            infer_seconds: 0.0,
            speedup: None,
        }
    }

    /// The row with every wall-clock-derived field cleared.
    pub fn without_timing(&self) -> ReportRow {
        ReportRow {
            prepare_seconds: 0.0,
            train_seconds: 0.0,
            feature_seconds: 0.0,
            infer_seconds: 0.0,
            speedup: None,
            ..self.clone()
        }
    }
}

/// Digest of the accuracy content of a report, independent of timing.
pub fn accuracy_digest(rows: &[ReportRow]) -> Result<String> {
    let stripped: Vec<ReportRow> = rows.iter().map(ReportRow::without_timing).collect();
    Ok(sha256_bytes(csv_text(&stripped)?.as_bytes()))
}

/// Column titles and cell text for the markdown rendering.
pub trait TableRow {
    fn titles() -> Vec<&'static str>;
    fn cells(&self) -> Vec<String>;
}

fn percent(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

fn seconds(x: f64) -> String {
    format!("{x:.4}")
}

impl TableRow for ReportRow {
    fn titles() -> Vec<&'static str> {
        vec![
            "Dataset",
            "Method",
            "Seed",
            "Top-k (%)",
            "Accuracy (%)",
            "Precision (%)",
            "Recall (%)",
            "F1 (%)",
            "Overlap (%)",
            "Prepare (s)",
            "Train (s)",
            "Features (s)",
            "Inference (s)",
            "Speedup",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.dataset.clone(),
            self.method.clone(),
            self.seed.to_string(),
            self.k_percent.to_string(),
            percent(self.accuracy),
            percent(self.precision),
            percent(self.recall),
            percent(self.f1),
            percent(self.overlap),
            seconds(self.prepare_seconds),
            seconds(self.train_seconds),
            seconds(self.feature_seconds),
            seconds(self.infer_seconds),
            self.speedup.map(|s| format!("{s:.1}x")).unwrap_or_else(|| "-".into()),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
            ReportFormat::Markdown => "md",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(BenchError::config(format!("unknown report format {other:?}"))),
        }
    }
}

pub fn csv_text<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|source| BenchError::Csv {
            path: "<report>".into(),
            source,
        })?;
    }
    let bytes = writer.into_inner().map_err(|e| BenchError::config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn json_text<T: Serialize>(rows: &[T]) -> Result<String> {
    serde_json::to_string_pretty(rows)
        .map(|s| s + "\n")
        .map_err(|e| BenchError::json("<report>", e))
}

/// Pipe table: a title line, a separator line, then one line per row.
pub fn markdown_text<T: TableRow>(rows: &[T]) -> String {
    let titles = T::titles();
    let mut out = format!("| {} |\n", titles.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(titles.len()));
    for row in rows {
        let _ = writeln!(out, "| {} |", row.cells().join(" | "));
    }
    out
}

pub fn render<T: Serialize + TableRow>(rows: &[T], format: ReportFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(BenchError::EmptyReport);
    }
    match format {
        ReportFormat::Csv => csv_text(rows),
        ReportFormat::Json => json_text(rows),
        ReportFormat::Markdown => Ok(markdown_text(rows)),
    }
}

/// Writes `rows` to `path` in the requested format.
pub fn emit_report<T: Serialize + TableRow>(rows: &[T], format: ReportFormat, path: &Path) -> Result<()> {
    let text = render(rows, format)?;
    fs::write(path, text).map_err(|e| BenchError::io(path, e))
}

pub fn parse_csv<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|source| BenchError::Csv {
            path: "<report>".into(),
            source,
        })
}

pub fn read_report<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| BenchError::json(path, e))
    } else {
        parse_csv(&text).map_err(|e| match e {
            BenchError::Csv { source, .. } => BenchError::Csv {
                path: path.to_path_buf(),
                source,
            },
            other => other,
        })
    }
}

/// JSON Schema for the JSON rendering of [`ReportRow`] lists.
pub const REPORT_JSON_SCHEMA: &str = r#"{
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "type": "array",
  "items": {
    "type": "object",
    "additionalProperties": false,
    "required": ["dataset", "method", "seed", "k_percent", "accuracy", "precision", "recall", "f1",
                 "overlap", "prepare_seconds", "train_seconds", "feature_seconds", "infer_seconds", "speedup"],
    "properties": {
      "dataset": {"type": "string"},
      "method": {"type": "string"},
      "seed": {"type": "integer", "minimum": 0},
      "k_percent": {"type": "number", "exclusiveMinimum": 0, "maximum": 100},
      "accuracy": {"type": "number", "minimum": 0, "maximum": 1},
      "precision": {"type": "number", "minimum": 0, "maximum": 1},
      "recall": {"type": "number", "minimum": 0, "maximum": 1},
      "f1": {"type": "number", "minimum": 0, "maximum": 1},
      "overlap": {"type": "number", "minimum": 0, "maximum": 1},
      "prepare_seconds": {"type": "number", "minimum": 0},
      "train_seconds": {"type": "number", "minimum": 0},
      "feature_seconds": {"type": "number", "minimum": 0},
      "infer_seconds": {"type": "number", "minimum": 0},
      "speedup": {"type": ["number", "null"], "minimum": 0}
    }
  }
}
"#;
