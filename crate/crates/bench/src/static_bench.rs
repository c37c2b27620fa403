use std::path::Path;

use shs_core::centrality::{accuracy, baseline_predict, closeness, constraint, label_top_k, ScoreVector};
use shs_core::features::node_features;
use shs_core::gnn::{predict_ranked, train, write_checkpoint, Checkpoint, ModelParams};
use shs_core::io::write_loss_history;

use crate::config::{ExperimentConfig, Method};
use crate::dataset::{prepare_dataset, write_dataset, PrepareOptions, PreparedDataset};
use crate::error::{BenchError, Result};
use crate::manifest::{ensure_dir, write_json, RunManifest};
use crate::report::{accuracy_digest, emit_report, ReportFormat, ReportRow};
use crate::timing::{best_of, timed};

/// Name of the all-normal sanity predictor that every accuracy report carries.
pub const MAJORITY: &str = "majority";

/// A model trained on the designated training graph at one k.
#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub k_percent: f64,
    pub params: ModelParams,
    pub losses: Vec<f64>,
    pub train_seconds: f64,
}

pub fn checkpoint_file(k_percent: f64) -> String {
    format!("graphshs_k{k_percent}.ckpt")
}

/// Trains one GraphSHS model per k on the training dataset.
pub fn train_models(train_data: &PreparedDataset, config: &ExperimentConfig) -> Result<Vec<TrainedModel>> {
    config
        .k_percents
        .iter()
        .map(|&k| {
            let labels = train_data.labels_for(k)?;
            let (outcome, train_seconds) = timed(|| {
                train(
                    &train_data.graph,
                    train_data.features.normalized().view(),
                    &labels.labels,
                    &config.model,
                )
            })?;
            Ok(TrainedModel {
                k_percent: k,
                params: outcome.params,
                losses: outcome.losses,
                train_seconds,
            })
        })
        .collect()
}

struct BaselineScores {
    method: Method,
    scores: ScoreVector,
    seconds: f64,
}

fn score_baselines(data: &PreparedDataset, config: &ExperimentConfig) -> Result<Vec<BaselineScores>> {
    let mut out = Vec::new();
    for &method in &config.methods {
        let (scores, seconds) = match method {
            Method::Constraint => best_of(config.repeat, || Ok::<_, BenchError>(constraint(&data.graph)))?,
            Method::Closeness => best_of(config.repeat, || Ok::<_, BenchError>(closeness(&data.graph)))?,
            // Ground truth was computed during preparation; reuse its timing.
            Method::Brandes => (data.bc.clone(), data.timings.bc_seconds),
            Method::Graphshs | Method::Meta => continue,
        };
        out.push(BaselineScores {
            method,
            scores,
            seconds,
        });
    }
    Ok(out)
}

/// Rows for one test dataset at every k: GraphSHS, the baselines, and the
/// majority row.
pub fn evaluate_dataset(
    data: &PreparedDataset,
    models: &[TrainedModel],
    config: &ExperimentConfig,
    seed: u64,
) -> Result<Vec<ReportRow>> {
    let baselines = score_baselines(data, config)?;
    let mut rows = Vec::new();
    for &k in &config.k_percents {
        let truth = data.labels_for(k)?;
        let mut cell = Vec::new();

        for &method in &config.methods {
            match method {
                Method::Graphshs => {
                    let model = models
                        .iter()
                        .find(|m| m.k_percent == k)
                        .ok_or_else(|| BenchError::config(format!("no model trained for k = {k}")))?;
                    let (features, feature_seconds) =
                        best_of(config.repeat, || Ok::<_, BenchError>(node_features(&data.graph)))?;
                    let (prediction, forward_seconds) = best_of(config.repeat, || {
                        predict_ranked(&model.params, &data.graph, features.normalized().view(), k)
                    })?;
                    let mut row = ReportRow::new(
                        data.id(),
                        method.name(),
                        seed,
                        k,
                        accuracy(&prediction.labels.labels, &truth.labels)?,
                    );
                    row.train_seconds = model.train_seconds;
                    row.feature_seconds = feature_seconds;
                    row.infer_seconds = if config.include_features {
                        forward_seconds + feature_seconds
                    } else {
                        forward_seconds
                    };
                    cell.push(row);
                }
                Method::Meta => {
                    return Err(BenchError::config(
                        "the meta method runs in the meta benchmark, not the static one",
                    ))
                }
                _ => {
                    let base = baselines.iter().find(|b| b.method == method).expect("scored above");
                    let (pred, rank_seconds) = if method == Method::Brandes {
                        best_of(config.repeat, || label_top_k(&base.scores, k))?
                    } else {
                        best_of(config.repeat, || {
                            baseline_predict(&base.scores, k, Some(config.constraint_order))
                        })?
                    };
                    let mut row = ReportRow::new(
                        data.id(),
                        method.name(),
                        seed,
                        k,
                        accuracy(&pred.labels, &truth.labels)?,
                    );
                    row.infer_seconds = base.seconds + rank_seconds;
                    cell.push(row);
                }
            }
        }

        let slowest = cell
            .iter()
            .filter(|r| r.method.parse::<Method>().is_ok_and(Method::is_baseline))
            .map(|r| r.infer_seconds)
            .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t))));
        for row in &mut cell {
            row.prepare_seconds = data.timings.total();
            row.speedup = slowest
                .filter(|_| row.infer_seconds > 0.0)
                .map(|s| s / row.infer_seconds);
        }

        let majority = vec![false; truth.len()];
        let mut row = ReportRow::new(data.id(), MAJORITY, seed, k, accuracy(&majority, &truth.labels)?);
        row.prepare_seconds = data.timings.total();
        cell.push(row);
        rows.extend(cell);
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct StaticOutcome {
    pub rows: Vec<ReportRow>,
    pub models: Vec<TrainedModel>,
}

/// Prepares the training and test datasets, trains GraphSHS once per k, and
/// evaluates every method on every test dataset and k.
///
/// With `out`, datasets, checkpoints, loss histories, the report in all
/// formats and a run manifest are written there.
pub fn run_static_benchmark(config: &ExperimentConfig, out: Option<&Path>) -> Result<StaticOutcome> {
    config.validate()?;
    let options = PrepareOptions {
        node_cap: config.node_cap,
        force: config.force,
    };
    let seed = config.model.seed;
    let needs_model = config.methods.contains(&Method::Graphshs);

    let models = if needs_model {
        let train_data = prepare_dataset(&config.train, &config.k_percents, options)?;
        if let Some(dir) = out {
            write_dataset(&train_data, &dir.join("datasets").join(train_data.id()))?;
        }
        train_models(&train_data, config)?
    } else {
        Vec::new()
    };

    let mut rows = Vec::new();
    for spec in &config.tests {
        let data = prepare_dataset(spec, &config.k_percents, options)?;
        if let Some(dir) = out {
            write_dataset(&data, &dir.join("datasets").join(data.id()))?;
        }
        rows.extend(evaluate_dataset(&data, &models, config, seed)?);
    }

    if let Some(dir) = out {
        let mut manifest = RunManifest::new("bench", config, config.seeds.clone())?;
        write_run_outputs(dir, &models, &rows, &mut manifest)?;
    }
    Ok(StaticOutcome { rows, models })
}

/// Checkpoints, loss histories, reports and the manifest of a benchmark run.
pub(crate) fn write_run_outputs(
    dir: &Path,
    models: &[TrainedModel],
    rows: &[ReportRow],
    manifest: &mut RunManifest,
) -> Result<()> {
    ensure_dir(dir)?;
    for model in models {
        let mut ckpt = Checkpoint::new(model.params.clone());
        ckpt.meta.push(("method".into(), "graphshs".into()));
        ckpt.meta.push(("k_percent".into(), model.k_percent.to_string()));
        let file = checkpoint_file(model.k_percent);
        write_checkpoint(&ckpt, dir.join(&file))?;
        manifest.add(dir, &file)?;
        let losses = format!("loss_k{}.csv", model.k_percent);
        write_loss_history(&model.losses, dir.join(&losses))?;
        manifest.add(dir, &losses)?;
    }
    for format in [ReportFormat::Csv, ReportFormat::Json, ReportFormat::Markdown] {
        let file = format!("report.{}", format.extension());
        emit_report(rows, format, &dir.join(&file))?;
        manifest.timed_outputs.push(file);
    }
    manifest.accuracy_sha256 = Some(accuracy_digest(rows)?);
    write_json(manifest, &dir.join("manifest.json"))
}
