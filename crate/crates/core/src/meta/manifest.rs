//! Task manifests: a JSON list of task graphs with their feature and label
//! files and the seed used to split labeled nodes into support and query.
//!
//! ```json
//! { "support_ratio": 0.5,
//!   "tasks": [ { "id": "sf-0", "graph": "sf-0/graph.edges",
//!                "features": "sf-0/features.csv", "labels": "sf-0/labels_k5.csv",
//!                "split_seed": 17 } ] }
//! ```
//!
//! Relative paths resolve against the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{split_support_query, TaskBundle};
use crate::error::{Result, ShsError};
use crate::graph::read_edgelist_dense;
use crate::io::{read_features, read_labels};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskEntry {
    pub id: String,
    pub graph: PathBuf,
    pub features: PathBuf,
    pub labels: PathBuf,
    pub split_seed: u64,
    /// Nodes allowed into either split; all nodes when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labeled: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskManifest {
    pub support_ratio: f64,
    pub tasks: Vec<TaskEntry>,
}

pub fn write_task_manifest(manifest: &TaskManifest, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(manifest).map_err(|e| ShsError::invalid(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| ShsError::io(path, e))
}

pub fn load_task_manifest(path: impl AsRef<Path>) -> Result<Vec<TaskBundle>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| ShsError::io(path, e))?;
    let manifest: TaskManifest = serde_json::from_str(&text).map_err(|e| ShsError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    manifest
        .tasks
        .iter()
        .map(|entry| {
            let graph = read_edgelist_dense(base.join(&entry.graph))?;
            let features = read_features(base.join(&entry.features))?;
            let (_, labels) = read_labels(base.join(&entry.labels))?;
            let labeled: Vec<usize> = match &entry.labeled {
                Some(nodes) => nodes.clone(),
                None => (0..graph.node_count()).collect(),
            };
            let (support, query) =
                split_support_query(&labeled, &labels.labels, manifest.support_ratio, entry.split_seed)?;
            TaskBundle::new(entry.id.clone(), graph, features, labels, support, query)
        })
        .collect()
}
