use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use shs_core::centrality::{accuracy, brandes_bc, label_top_k};
use shs_core::features::{node_features, rows_touched_by_edge};
use shs_core::gnn::{predict_ranked, ModelParams};
use shs_core::graph::Graph;

use crate::error::{BenchError, Result};
use crate::report::TableRow;
use crate::timing::timed;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicConfig {
    pub deletions: usize,
    pub k_percent: f64,
    pub seed: u64,
}

/// One deletion: incremental GraphSHS update versus full recomputation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicStep {
    pub step: usize,
    pub u: usize,
    pub v: usize,
    pub edges_after: usize,
    /// Feature rows refreshed by the incremental update.
    pub touched_rows: usize,
    /// Feature refresh, renormalization and ranked prediction.
    pub incremental_seconds: f64,
    /// Exact betweenness plus top-k labeling of the updated graph.
    pub recompute_seconds: f64,
    pub speedup: f64,
    /// Agreement of the incremental prediction with the recomputed labels.
    pub accuracy: f64,
    pub overlap: f64,
}

impl TableRow for DynamicStep {
    fn titles() -> Vec<&'static str> {
        vec![
            "Step",
            "Edge",
            "Edges after",
            "Rows updated",
            "GraphSHS (s)",
            "Recompute (s)",
            "Speedup",
            "Accuracy (%)",
            "Overlap (%)",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.step.to_string(),
            format!("{}-{}", self.u, self.v),
            self.edges_after.to_string(),
            self.touched_rows.to_string(),
            format!("{:.4}", self.incremental_seconds),
            format!("{:.4}", self.recompute_seconds),
            format!("{:.1}x", self.speedup),
            format!("{:.2}", 100.0 * self.accuracy),
            format!("{:.2}", 100.0 * self.overlap),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicReport {
    pub config: DynamicConfig,
    pub nodes: usize,
    pub initial_edges: usize,
    pub steps: Vec<DynamicStep>,
    /// Mean of the per-step speedups.
    pub average_speedup: f64,
    /// Total recompute time over total incremental time.
    pub aggregate_speedup: f64,
}

/// Deletes `config.deletions` uniformly random edges one at a time. After each
/// deletion the affected feature rows are refreshed and GraphSHS re-ranks the
/// nodes; this is timed against exact betweenness plus labeling on the same
/// updated graph. The graph is validated after every step.
pub fn run_dynamic_experiment(graph: &Graph, params: &ModelParams, config: DynamicConfig) -> Result<DynamicReport> {
    if config.deletions > graph.edge_count() {
        return Err(BenchError::config(format!(
            "cannot delete {} edges from a graph with {}",
            config.deletions,
            graph.edge_count()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut g = graph.clone();
    let mut features = node_features(&g);
    let mut mark = vec![false; g.node_count()];
    let mut steps = Vec::with_capacity(config.deletions);

    for step in 0..config.deletions {
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let (u, v) = edges[rng.random_range(0..edges.len())];
        let touched = rows_touched_by_edge(&g, u, v);
        let before = g.edge_count();
        g = g.delete_edge(u, v)?;
        g.validate()?;
        if g.edge_count() + 1 != before {
            return Err(BenchError::config(format!(
                "deleting {u}-{v} changed the edge count by more than one"
            )));
        }

        let (prediction, incremental_seconds) = timed(|| {
            features.update_rows(&g, &touched, &mut mark);
            features.renormalize();
            predict_ranked(params, &g, features.normalized().view(), config.k_percent)
        })?;
        let (truth, recompute_seconds) = timed(|| label_top_k(&brandes_bc(&g), config.k_percent))?;
        let metrics = accuracy(&prediction.labels.labels, &truth.labels)?;
        steps.push(DynamicStep {
            step,
            u,
            v,
            edges_after: g.edge_count(),
            touched_rows: touched.len(),
            incremental_seconds,
            recompute_seconds,
            speedup: recompute_seconds / incremental_seconds.max(f64::MIN_POSITIVE),
            accuracy: metrics.accuracy,
            overlap: metrics.overlap,
        });
    }

    let count = steps.len().max(1) as f64;
    let total_incremental: f64 = steps.iter().map(|s| s.incremental_seconds).sum();
    let total_recompute: f64 = steps.iter().map(|s| s.recompute_seconds).sum();
    Ok(DynamicReport {
        config,
        nodes: graph.node_count(),
        initial_edges: graph.edge_count(),
        average_speedup: steps.iter().map(|s| s.speedup).sum::<f64>() / count,
        aggregate_speedup: total_recompute / total_incremental.max(f64::MIN_POSITIVE),
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use shs_core::gnn::{init_params, TrainConfig};
    use shs_core::graph::{generate_sf, SfParams};

    #[test]
    fn incremental_features_match_full_recompute() {
        let g = generate_sf(300, SfParams::default(), 2).unwrap();
        let cfg = TrainConfig {
            layers: 2,
            hidden: 8,
            ..TrainConfig::default()
        };
        let params = init_params(&cfg, 1).unwrap();
        let report = run_dynamic_experiment(
            &g,
            &params,
            DynamicConfig {
                deletions: 10,
                k_percent: 5.0,
                seed: 4,
            },
        )
        .unwrap();
        assert_eq!(report.steps.len(), 10);
        for (i, s) in report.steps.iter().enumerate() {
            assert_eq!(s.edges_after, g.edge_count() - i - 1);
        }

        // Replaying the deletions and recomputing features from scratch gives
        // the same raw rows as the incremental path.
        let mut replay = g.clone();
        let mut incremental = node_features(&g);
        let mut mark = vec![false; g.node_count()];
        for s in &report.steps {
            let touched = rows_touched_by_edge(&replay, s.u, s.v);
            replay = replay.delete_edge(s.u, s.v).unwrap();
            incremental.update_rows(&replay, &touched, &mut mark);
        }
        incremental.renormalize();
        let full = node_features(&replay);
        assert_eq!(incremental.raw(), full.raw());
    }

    #[test]
    fn too_many_deletions_rejected() {
        let g = generate_sf(10, SfParams::default(), 2).unwrap();
        let params = init_params(&TrainConfig::default(), 0).unwrap();
        let config = DynamicConfig {
            deletions: g.edge_count() + 1,
            k_percent: 5.0,
            seed: 0,
        };
        assert!(run_dynamic_experiment(&g, &params, config).is_err());
    }
}
