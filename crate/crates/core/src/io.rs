//! CSV artifacts: scores, labels, features, feature statistics and loss
//! histories. Floats are written with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::centrality::{LabelVector, ScoreKind, ScoreVector};
use crate::error::{Result, ShsError};
use crate::features::{FeatureMatrix, FEATURE_DIM, FEATURE_NAMES};

/// 17 significant digits in scientific notation; parses back to the same bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_text(path: &Path, text: String) -> Result<()> {
    fs::write(path, text).map_err(|e| ShsError::io(path, e))
}

fn read_rows(path: &Path, header: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let text = fs::read_to_string(path).map_err(|e| ShsError::io(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        _ => {
            return Err(ShsError::Parse {
                path: path.to_path_buf(),
                line: 1,
                message: format!("expected header `{header}`"),
            })
        }
    }
    let width = header.split(',').count();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        if fields.len() != width {
            return Err(ShsError::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("expected {width} fields, found {}", fields.len()),
            });
        }
        rows.push((idx + 1, fields));
    }
    Ok(rows)
}

fn field<T: std::str::FromStr>(path: &Path, line: usize, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e: T::Err| ShsError::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("bad value {raw:?}: {e}"),
    })
}

fn check_dense_ids(path: &Path, rows: &[(usize, Vec<String>)]) -> Result<()> {
    for (expected, (line, fields)) in rows.iter().enumerate() {
        let node: usize = field(path, *line, &fields[0])?;
        if node != expected {
            return Err(ShsError::Parse {
                path: path.to_path_buf(),
                line: *line,
                message: format!("expected node {expected}, found {node}"),
            });
        }
    }
    Ok(())
}

pub fn scores_csv(scores: &ScoreVector) -> String {
    let mut out = String::from("node,score\n");
    for (i, &s) in scores.values.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", fmt_f64(s));
    }
    out
}

pub fn write_scores(scores: &ScoreVector, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), scores_csv(scores))
}

pub fn read_scores(path: impl AsRef<Path>, kind: ScoreKind) -> Result<ScoreVector> {
    let path = path.as_ref();
    let rows = read_rows(path, "node,score")?;
    check_dense_ids(path, &rows)?;
    let values = rows
        .iter()
        .map(|(line, f)| field::<f64>(path, *line, &f[1]))
        .collect::<Result<_>>()?;
    Ok(ScoreVector::new(kind, values))
}

pub fn labels_csv(scores: &ScoreVector, labels: &LabelVector) -> Result<String> {
    if scores.len() != labels.len() {
        return Err(ShsError::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    let mut out = String::from("node,score,label\n");
    for (i, (&s, &l)) in scores.values.iter().zip(&labels.labels).enumerate() {
        let _ = writeln!(out, "{i},{},{}", fmt_f64(s), u8::from(l));
    }
    Ok(out)
}

pub fn write_labels(scores: &ScoreVector, labels: &LabelVector, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), labels_csv(scores, labels)?)
}

/// Reads `node,score,label` rows. The returned labels carry no `k_percent`.
pub fn read_labels(path: impl AsRef<Path>) -> Result<(Vec<f64>, LabelVector)> {
    let path = path.as_ref();
    let rows = read_rows(path, "node,score,label")?;
    check_dense_ids(path, &rows)?;
    let mut scores = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for (line, f) in &rows {
        scores.push(field::<f64>(path, *line, &f[1])?);
        labels.push(match f[2].as_str() {
            "0" => false,
            "1" => true,
            other => {
                return Err(ShsError::Parse {
                    path: path.to_path_buf(),
                    line: *line,
                    message: format!("label must be 0 or 1, found {other:?}"),
                })
            }
        });
    }
    Ok((scores, LabelVector::unranked(labels)))
}

pub fn features_csv(features: &FeatureMatrix) -> String {
    let mut out = format!("node,{}\n", FEATURE_NAMES.join(","));
    for (i, row) in features.raw().iter().enumerate() {
        let _ = writeln!(out, "{i},{},{},{}", fmt_f64(row[0]), fmt_f64(row[1]), fmt_f64(row[2]));
    }
    out
}

pub fn write_features(features: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), features_csv(features))
}

/// Reads raw features and renormalizes them.
pub fn read_features(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let rows = read_rows(path, &format!("node,{}", FEATURE_NAMES.join(",")))?;
    check_dense_ids(path, &rows)?;
    let mut raw = Vec::with_capacity(rows.len());
    for (line, f) in &rows {
        let mut row = [0.0; FEATURE_DIM];
        for (c, value) in row.iter_mut().enumerate() {
            *value = field(path, *line, &f[c + 1])?;
        }
        raw.push(row);
    }
    Ok(FeatureMatrix::from_raw(raw))
}

pub fn stats_csv(features: &FeatureMatrix) -> String {
    let mut out = String::from("column,mean,std\n");
    for (name, s) in FEATURE_NAMES.iter().zip(features.stats()) {
        let _ = writeln!(out, "{name},{},{}", fmt_f64(s.mean), fmt_f64(s.std));
    }
    out
}

pub fn write_stats(features: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), stats_csv(features))
}

pub fn loss_history_csv(losses: &[f64]) -> String {
    let mut out = String::from("epoch,loss\n");
    for (epoch, &l) in losses.iter().enumerate() {
        let _ = writeln!(out, "{epoch},{}", fmt_f64(l));
    }
    out
}

pub fn write_loss_history(losses: &[f64], path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), loss_history_csv(losses))
}
