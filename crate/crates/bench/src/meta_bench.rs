use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use shs_core::centrality::{accuracy, brandes_bc, label_top_k, LabelVector, ScoreVector};
use shs_core::features::{node_features, FeatureMatrix};
use shs_core::gnn::{train_many, write_checkpoint, Checkpoint, ModelParams, TrainConfig, TrainingGraph};
use shs_core::graph::{generate, write_edgelist, GeneratorSpec, Graph, GrpParams, SfParams};
use shs_core::io::{write_features, write_labels};
use shs_core::meta::{
    fine_tune, meta_evaluate, meta_train, split_support_query, write_task_manifest, MetaConfig, PredictMode,
    TaskBundle, TaskEntry, TaskManifest,
};

use crate::config::Scale;
use crate::error::{BenchError, Result};
use crate::manifest::{ensure_dir, write_json, RunManifest};
use crate::report::{accuracy_digest, emit_report, ReportFormat, ReportRow};
use crate::static_bench::MAJORITY;
use crate::timing::timed;

pub const META: &str = "meta";
pub const GRAPHSHS_FROZEN: &str = "graphshs-frozen";
pub const GRAPHSHS_FINETUNED: &str = "graphshs-finetuned";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaBenchConfig {
    pub tasks_per_family: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub k_percent: f64,
    /// Fraction of tasks used for meta-training; the rest are held out.
    pub train_fraction: f64,
    /// Fraction of each held-out task's nodes whose labels are visible.
    pub test_labeled_fraction: f64,
    /// ER tasks get `p = er_mean_degree / (n - 1)`.
    pub er_mean_degree: f64,
    pub grp: GrpParams,
    pub model: TrainConfig,
    pub meta: MetaConfig,
    pub seeds: Vec<u64>,
    pub predict: PredictMode,
}

impl MetaBenchConfig {
    pub fn preset(scale: Scale, seeds: Vec<u64>) -> Self {
        let (tasks_per_family, min_nodes, max_nodes) = match scale {
            Scale::Desk => (4, 300, 1000),
            Scale::Paper => (12, 1000, 5000),
        };
        MetaBenchConfig {
            tasks_per_family,
            min_nodes,
            max_nodes,
            k_percent: 5.0,
            train_fraction: 0.8,
            test_labeled_fraction: 0.5,
            er_mean_degree: 5.0,
            grp: GrpParams::default(),
            model: TrainConfig::default(),
            meta: MetaConfig::default(),
            seeds,
            predict: PredictMode::Ranked { k_percent: 5.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasks_per_family == 0 || self.min_nodes < 3 || self.min_nodes > self.max_nodes {
            return Err(BenchError::config(
                "corpus needs tasks and a valid node range (at least 3 nodes)",
            ));
        }
        for (name, f) in [
            ("train_fraction", self.train_fraction),
            ("test_labeled_fraction", self.test_labeled_fraction),
        ] {
            if !(f > 0.0 && f < 1.0) {
                return Err(BenchError::config(format!("{name} must lie in (0, 1)")));
            }
        }
        let (train, test) = self.task_split_sizes();
        if train < 2 || test == 0 {
            return Err(BenchError::config(format!(
                "task split {train}/{test} needs at least two training tasks and one test task"
            )));
        }
        if self.seeds.is_empty() {
            return Err(BenchError::config("at least one seed is required"));
        }
        self.model.validate()?;
        self.meta.validate()?;
        Ok(())
    }

    pub fn task_count(&self) -> usize {
        3 * self.tasks_per_family
    }

    pub fn task_split_sizes(&self) -> (usize, usize) {
        let total = self.task_count();
        let train = ((self.train_fraction * total as f64).round() as usize).min(total);
        (train, total - train)
    }
}

/// One labeled graph of the meta corpus.
#[derive(Clone, Debug)]
pub struct CorpusTask {
    pub id: String,
    pub generator: GeneratorSpec,
    pub graph: Graph,
    pub features: FeatureMatrix,
    pub bc: ScoreVector,
    pub labels: LabelVector,
    pub bc_seconds: f64,
}

/// Generates the ER/SF/GRP corpus with ground-truth labels at `k_percent`.
pub fn build_corpus(config: &MetaBenchConfig, seed: u64) -> Result<Vec<CorpusTask>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tasks = Vec::with_capacity(config.task_count());
    for family in ["er", "sf", "grp"] {
        for i in 0..config.tasks_per_family {
            let n = rng.random_range(config.min_nodes..=config.max_nodes);
            let graph_seed = rng.random::<u64>();
            let generator = match family {
                "er" => GeneratorSpec::Er {
                    n,
                    p: (config.er_mean_degree / (n - 1) as f64).min(1.0),
                    seed: graph_seed,
                },
                "sf" => GeneratorSpec::Sf {
                    n,
                    params: SfParams::default(),
                    seed: graph_seed,
                },
                _ => GeneratorSpec::Grp {
                    n,
                    params: config.grp,
                    seed: graph_seed,
                },
            };
            let graph = generate(&generator)?;
            let (bc, bc_seconds) = timed(|| Ok::<_, BenchError>(brandes_bc(&graph)))?;
            tasks.push(CorpusTask {
                id: format!("{family}-{i}"),
                generator,
                features: node_features(&graph),
                labels: label_top_k(&bc, config.k_percent)?,
                bc,
                graph,
                bc_seconds,
            });
        }
    }
    Ok(tasks)
}

/// Seeded split of task indices into (meta-train, held-out).
pub fn split_tasks(count: usize, train: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..count).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x7a5c_0001));
    let mut train_ids = order[..train].to_vec();
    let mut test_ids = order[train..].to_vec();
    train_ids.sort_unstable();
    test_ids.sort_unstable();
    (train_ids, test_ids)
}

fn bundle(task: &CorpusTask, ratio: f64, split_seed: u64) -> Result<TaskBundle> {
    let nodes: Vec<usize> = (0..task.graph.node_count()).collect();
    let (support, query) = split_support_query(&nodes, &task.labels.labels, ratio, split_seed)?;
    Ok(TaskBundle::new(
        task.id.clone(),
        task.graph.clone(),
        task.features.clone(),
        task.labels.clone(),
        support,
        query,
    )?)
}

fn split_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(index as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub mean_accuracy: f64,
    pub mean_overlap: f64,
    pub evaluations: usize,
}

#[derive(Clone, Debug)]
pub struct SeedModels {
    pub seed: u64,
    pub meta: ModelParams,
    pub meta_query_losses: Vec<f64>,
    pub graphshs: ModelParams,
    pub train_task_ids: Vec<String>,
    pub test_task_ids: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct MetaBenchOutcome {
    pub rows: Vec<ReportRow>,
    pub summary: Vec<MethodSummary>,
    pub models: Vec<SeedModels>,
}

pub fn summarize(rows: &[ReportRow]) -> Vec<MethodSummary> {
    let mut methods: Vec<&str> = Vec::new();
    for row in rows {
        if !methods.contains(&row.method.as_str()) {
            methods.push(&row.method);
        }
    }
    methods
        .into_iter()
        .map(|method| {
            let picked: Vec<&ReportRow> = rows.iter().filter(|r| r.method == method).collect();
            let count = picked.len() as f64;
            MethodSummary {
                method: method.to_string(),
                mean_accuracy: picked.iter().map(|r| r.accuracy).sum::<f64>() / count,
                mean_overlap: picked.iter().map(|r| r.overlap).sum::<f64>() / count,
                evaluations: picked.len(),
            }
        })
        .collect()
}

/// For every seed: builds the corpus, meta-trains on the training tasks,
/// trains GraphSHS conventionally on the same tasks, and evaluates Meta,
/// frozen GraphSHS, fine-tuned GraphSHS and the majority predictor on the
/// query nodes of each held-out task.
pub fn run_meta_benchmark(config: &MetaBenchConfig, out: Option<&Path>) -> Result<MetaBenchOutcome> {
    config.validate()?;
    let (train_count, _) = config.task_split_sizes();
    let mut rows = Vec::new();
    let mut models = Vec::new();
    for &seed in &config.seeds {
        let corpus = build_corpus(config, seed)?;
        let (train_idx, test_idx) = split_tasks(corpus.len(), train_count, seed);
        let train_tasks = train_idx
            .iter()
            .map(|&i| bundle(&corpus[i], config.meta.support_ratio, split_seed(seed, i)))
            .collect::<Result<Vec<_>>>()?;
        let test_tasks = test_idx
            .iter()
            .map(|&i| bundle(&corpus[i], config.test_labeled_fraction, split_seed(seed, i)))
            .collect::<Result<Vec<_>>>()?;
        for test in &test_tasks {
            if train_tasks.iter().any(|t| t.id == test.id) {
                return Err(BenchError::config(format!(
                    "held-out task {} leaked into training",
                    test.id
                )));
            }
        }

        let meta_config = MetaConfig {
            seed,
            ..config.meta.clone()
        };
        let (meta, meta_seconds) = timed(|| meta_train(&train_tasks, &meta_config, &config.model))?;

        let model_config = TrainConfig {
            seed,
            ..config.model.clone()
        };
        let pooled: Vec<TrainingGraph<'_>> = train_tasks
            .iter()
            .map(|t| TrainingGraph {
                graph: &t.graph,
                features: t.features.normalized().view(),
                labels: &t.labels.labels,
            })
            .collect();
        let (graphshs, graphshs_seconds) = timed(|| train_many(&pooled, &model_config))?;

        for (test, &index) in test_tasks.iter().zip(&test_idx) {
            let prepare_seconds = corpus[index].bc_seconds;
            let steps = config.meta.fine_tune_steps;
            let alpha = config.meta.inner_lr;

            let mut evaluate = |method: &str, start: &ModelParams, tune: bool, train_seconds: f64| -> Result<()> {
                let ((params, metrics), seconds) = timed(|| {
                    let params = if tune {
                        fine_tune(start, test, alpha, steps)?.0
                    } else {
                        start.clone()
                    };
                    let metrics = meta_evaluate(&params, test, config.predict)?;
                    Ok::<_, BenchError>((params, metrics))
                })?;
                if !params.is_finite() {
                    return Err(shs_core::ShsError::NonFinite(format!("{method} parameters on {}", test.id)).into());
                }
                let mut row = ReportRow::new(&test.id, method, seed, config.k_percent, metrics);
                row.prepare_seconds = prepare_seconds;
                row.train_seconds = train_seconds;
                row.infer_seconds = seconds;
                rows.push(row);
                Ok(())
            };
            evaluate(META, &meta.params, true, meta_seconds)?;
            evaluate(GRAPHSHS_FROZEN, &graphshs.params, false, graphshs_seconds)?;
            evaluate(GRAPHSHS_FINETUNED, &graphshs.params, true, graphshs_seconds)?;

            let truth: Vec<bool> = test.query.iter().map(|&v| test.labels.labels[v]).collect();
            let mut row = ReportRow::new(
                &test.id,
                MAJORITY,
                seed,
                config.k_percent,
                accuracy(&vec![false; truth.len()], &truth)?,
            );
            row.prepare_seconds = prepare_seconds;
            rows.push(row);
        }

        models.push(SeedModels {
            seed,
            meta: meta.params,
            meta_query_losses: meta.query_losses,
            graphshs: graphshs.params,
            train_task_ids: train_tasks.iter().map(|t| t.id.clone()).collect(),
            test_task_ids: test_tasks.iter().map(|t| t.id.clone()).collect(),
        });
    }

    let summary = summarize(&rows);
    if let Some(dir) = out {
        write_meta_outputs(dir, config, &rows, &summary, &models)?;
    }
    Ok(MetaBenchOutcome { rows, summary, models })
}

fn write_meta_outputs(
    dir: &Path,
    config: &MetaBenchConfig,
    rows: &[ReportRow],
    summary: &[MethodSummary],
    models: &[SeedModels],
) -> Result<()> {
    ensure_dir(dir)?;
    let mut manifest = RunManifest::new("bench-meta", config, config.seeds.clone())?;
    for m in models {
        let mut ckpt = Checkpoint::new(m.meta.clone());
        ckpt.meta.push(("method".into(), META.into()));
        ckpt.meta.extend(
            MetaConfig {
                seed: m.seed,
                ..config.meta.clone()
            }
            .header(),
        );
        ckpt.meta.push(("train_tasks".into(), m.train_task_ids.join(",")));
        let file = format!("meta_s{}.ckpt", m.seed);
        write_checkpoint(&ckpt, dir.join(&file))?;
        manifest.add(dir, &file)?;

        let mut ckpt = Checkpoint::new(m.graphshs.clone());
        ckpt.meta.push(("method".into(), "graphshs".into()));
        ckpt.meta.push(("train_tasks".into(), m.train_task_ids.join(",")));
        let file = format!("graphshs_s{}.ckpt", m.seed);
        write_checkpoint(&ckpt, dir.join(&file))?;
        manifest.add(dir, &file)?;
    }
    write_json(&summary, &dir.join("summary.json"))?;
    manifest.add(dir, "summary.json")?;
    for format in [ReportFormat::Csv, ReportFormat::Json, ReportFormat::Markdown] {
        let file = format!("report.{}", format.extension());
        emit_report(rows, format, &dir.join(&file))?;
        manifest.timed_outputs.push(file);
    }
    manifest.accuracy_sha256 = Some(accuracy_digest(rows)?);
    write_json(&manifest, &dir.join("manifest.json"))
}

/// Writes a corpus as per-task directories plus a task manifest that the
/// meta trainer can load. Returns the manifest path.
pub fn write_corpus(
    tasks: &[CorpusTask],
    config: &MetaBenchConfig,
    seed: u64,
    dir: &Path,
) -> Result<std::path::PathBuf> {
    ensure_dir(dir)?;
    let labels_name = format!("labels_k{}.csv", config.k_percent);
    let mut entries = Vec::new();
    for (i, task) in tasks.iter().enumerate() {
        let task_dir = dir.join(&task.id);
        ensure_dir(&task_dir)?;
        write_edgelist(&task.graph, task_dir.join("graph.edges"))?;
        write_features(&task.features, task_dir.join("features.csv"))?;
        write_labels(&task.bc, &task.labels, task_dir.join(&labels_name))?;
        entries.push(TaskEntry {
            id: task.id.clone(),
            graph: Path::new(&task.id).join("graph.edges"),
            features: Path::new(&task.id).join("features.csv"),
            labels: Path::new(&task.id).join(&labels_name),
            split_seed: split_seed(seed, i),
            labeled: None,
        });
    }
    let manifest = TaskManifest {
        support_ratio: config.meta.support_ratio,
        tasks: entries,
    };
    let path = dir.join("tasks.json");
    write_task_manifest(&manifest, &path)?;
    Ok(path)
}
