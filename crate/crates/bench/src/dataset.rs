use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use shs_core::centrality::{brandes_bc, label_top_k, LabelVector, ScoreKind, ScoreVector};
use shs_core::features::{node_features, FeatureMatrix};
use shs_core::graph::{generate, read_edgelist, read_edgelist_dense, write_edgelist, write_idmap, Graph};
use shs_core::io::{read_features, read_labels, read_scores, write_features, write_labels, write_scores, write_stats};

use crate::config::DatasetSpec;
use crate::error::{BenchError, Result};
use crate::manifest::{ensure_dir, read_json, write_json, Artifact};

pub const GRAPH_FILE: &str = "graph.edges";
pub const FEATURES_FILE: &str = "features.csv";
pub const BC_FILE: &str = "bc.csv";
pub const STATS_FILE: &str = "stats.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn labels_file(k_percent: f64) -> String {
    format!("labels_k{k_percent}.csv")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PrepareTimings {
    pub load_seconds: f64,
    pub bc_seconds: f64,
    pub feature_seconds: f64,
}

impl PrepareTimings {
    pub fn total(&self) -> f64 {
        self.load_seconds + self.bc_seconds + self.feature_seconds
    }
}

/// A graph with its ground truth and model inputs.
#[derive(Clone, Debug)]
pub struct PreparedDataset {
    pub spec: DatasetSpec,
    pub graph: Graph,
    /// Ids used in the source file, for edge-list inputs.
    pub original_ids: Option<Vec<u64>>,
    pub features: FeatureMatrix,
    pub bc: ScoreVector,
    /// Ground-truth labels, one per requested k.
    pub labels: Vec<(f64, LabelVector)>,
    pub timings: PrepareTimings,
}

impl PreparedDataset {
    pub fn id(&self) -> &str {
        self.spec.id()
    }

    pub fn labels_for(&self, k_percent: f64) -> Result<&LabelVector> {
        self.labels
            .iter()
            .find(|(k, _)| *k == k_percent)
            .map(|(_, l)| l)
            .ok_or_else(|| BenchError::config(format!("dataset {} has no labels for k = {k_percent}", self.id())))
    }

    pub fn k_percents(&self) -> Vec<f64> {
        self.labels.iter().map(|(k, _)| *k).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PrepareOptions {
    pub node_cap: usize,
    pub force: bool,
}

fn load_graph(spec: &DatasetSpec) -> Result<(Graph, Option<Vec<u64>>)> {
    match spec {
        DatasetSpec::Generated { generator, .. } => Ok((generate(generator)?, None)),
        DatasetSpec::EdgeList { path, .. } => {
            let loaded = read_edgelist(path)?;
            Ok((loaded.graph, Some(loaded.original_ids)))
        }
    }
}

/// Builds the graph, computes exact betweenness, labels it at every k, and
/// extracts normalized features.
pub fn prepare_dataset(spec: &DatasetSpec, k_percents: &[f64], options: PrepareOptions) -> Result<PreparedDataset> {
    let start = Instant::now();
    let (graph, original_ids) = load_graph(spec)?;
    let load_seconds = start.elapsed().as_secs_f64();
    let n = graph.node_count();
    if n > options.node_cap && !options.force {
        return Err(BenchError::NodeCap {
            n,
            cap: options.node_cap,
        });
    }

    let start = Instant::now();
    let bc = brandes_bc(&graph);
    let bc_seconds = start.elapsed().as_secs_f64();

    let labels = k_percents
        .iter()
        .map(|&k| Ok((k, label_top_k(&bc, k)?)))
        .collect::<Result<Vec<_>>>()?;

    let start = Instant::now();
    let features = node_features(&graph);
    let feature_seconds = start.elapsed().as_secs_f64();

    Ok(PreparedDataset {
        spec: spec.clone(),
        graph,
        original_ids,
        features,
        bc,
        labels,
        timings: PrepareTimings {
            load_seconds,
            bc_seconds,
            feature_seconds,
        },
    })
}

/// Manifest of a prepared dataset directory. Timings are kept out of it so
/// reruns produce identical manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset: String,
    pub spec: DatasetSpec,
    pub nodes: usize,
    pub edges: usize,
    pub k_percents: Vec<f64>,
    /// Graph, features, betweenness and one label file per k.
    pub artifacts: Vec<Artifact>,
    /// Normalization statistics and, for edge-list inputs, the id map.
    pub auxiliary: Vec<Artifact>,
}

/// Writes every artifact of `data` into `dir` and returns the manifest, which
/// is also written as `manifest.json`.
pub fn write_dataset(data: &PreparedDataset, dir: &Path) -> Result<DatasetManifest> {
    ensure_dir(dir)?;
    write_edgelist(&data.graph, dir.join(GRAPH_FILE))?;
    write_features(&data.features, dir.join(FEATURES_FILE))?;
    write_scores(&data.bc, dir.join(BC_FILE))?;
    let mut artifacts = vec![
        Artifact::of(dir, GRAPH_FILE)?,
        Artifact::of(dir, FEATURES_FILE)?,
        Artifact::of(dir, BC_FILE)?,
    ];
    for (k, labels) in &data.labels {
        let file = labels_file(*k);
        write_labels(&data.bc, labels, dir.join(&file))?;
        artifacts.push(Artifact::of(dir, &file)?);
    }

    write_stats(&data.features, dir.join(STATS_FILE))?;
    let mut auxiliary = vec![Artifact::of(dir, STATS_FILE)?];
    if let Some(ids) = &data.original_ids {
        let idmap = write_idmap(ids, dir.join(GRAPH_FILE))?;
        let name = idmap
            .file_name()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        auxiliary.push(Artifact::of(dir, &name)?);
    }

    let manifest = DatasetManifest {
        dataset: data.id().to_string(),
        spec: data.spec.clone(),
        nodes: data.graph.node_count(),
        edges: data.graph.edge_count(),
        k_percents: data.k_percents(),
        artifacts,
        auxiliary,
    };
    write_json(&manifest, &dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}

/// Reads a directory produced by [`write_dataset`]. Label files are checked
/// against labels recomputed from the stored betweenness.
pub fn load_dataset(dir: &Path) -> Result<PreparedDataset> {
    let manifest: DatasetManifest = read_json(&dir.join(MANIFEST_FILE))?;
    let graph = read_edgelist_dense(dir.join(GRAPH_FILE))?;
    let features = read_features(dir.join(FEATURES_FILE))?;
    let bc = read_scores(dir.join(BC_FILE), ScoreKind::Bc)?;
    if features.node_count() != graph.node_count() || bc.len() != graph.node_count() {
        return Err(BenchError::config(format!(
            "{}: graph, features and scores disagree on the node count",
            dir.display()
        )));
    }
    let mut labels = Vec::new();
    for &k in &manifest.k_percents {
        let path: PathBuf = dir.join(labels_file(k));
        let (_, stored) = read_labels(&path)?;
        let expected = label_top_k(&bc, k)?;
        if stored.labels != expected.labels {
            return Err(BenchError::config(format!(
                "{}: labels do not match the top {k}% of the stored scores",
                path.display()
            )));
        }
        labels.push((k, expected));
    }
    Ok(PreparedDataset {
        spec: manifest.spec,
        graph,
        original_ids: None,
        features,
        bc,
        labels,
        timings: PrepareTimings::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use shs_core::graph::GeneratorSpec;

    fn options() -> PrepareOptions {
        PrepareOptions {
            node_cap: 1000,
            force: false,
        }
    }

    #[test]
    fn er_100_has_five_labels() {
        let spec = DatasetSpec::generated(GeneratorSpec::Er {
            n: 100,
            p: 0.05,
            seed: 7,
        });
        let data = prepare_dataset(&spec, &[5.0], options()).unwrap();
        assert_eq!(data.labels_for(5.0).unwrap().positives(), 5);
        assert!(data.labels_for(10.0).is_err());
    }

    #[test]
    fn node_cap_needs_force() {
        let spec = DatasetSpec::sf(50, 1);
        let tight = PrepareOptions {
            node_cap: 10,
            force: false,
        };
        assert!(matches!(
            prepare_dataset(&spec, &[5.0], tight),
            Err(BenchError::NodeCap { n: 50, cap: 10 })
        ));
        let forced = PrepareOptions {
            node_cap: 10,
            force: true,
        };
        assert!(prepare_dataset(&spec, &[5.0], forced).is_ok());
    }
}
