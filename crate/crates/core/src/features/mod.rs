//! Ego-network features: effective size, efficiency and degree, z-scored
//! per graph into the classifier's input matrix.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::Graph;

pub const FEATURE_NAMES: [&str; 3] = ["effective_size", "efficiency", "degree"];
pub const FEATURE_DIM: usize = 3;

/// Induced subgraph on the nodes within `radius` hops of a center.
#[derive(Clone, Debug)]
pub struct EgoNetwork {
    pub graph: Graph,
    /// `nodes[local]` is the id in the parent graph; the center is local id 0.
    pub nodes: Vec<usize>,
}

pub fn ego_network(g: &Graph, center: usize, radius: usize) -> Result<EgoNetwork> {
    g.check_node(center)?;
    if radius == 0 {
        return Err(crate::error::ShsError::invalid("ego radius must be at least 1"));
    }
    let mut local = std::collections::HashMap::new();
    let mut nodes = vec![center];
    local.insert(center, 0usize);
    let mut frontier = vec![center];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in g.neighbors(v) {
                if let std::collections::hash_map::Entry::Vacant(e) = local.entry(w) {
                    e.insert(nodes.len());
                    nodes.push(w);
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    let mut edges = Vec::new();
    for (a, &v) in nodes.iter().enumerate() {
        for &w in g.neighbors(v) {
            if let Some(&b) = local.get(&w) {
                if a < b {
                    edges.push((a, b));
                }
            }
        }
    }
    Ok(EgoNetwork {
        graph: Graph::from_edges(nodes.len(), &edges)?,
        nodes,
    })
}

/// Number of edges among the neighbors of `v` (the ego itself excluded).
pub fn neighbor_edges(g: &Graph, v: usize, mark: &mut [bool]) -> usize {
    let neighbors = g.neighbors(v);
    for &u in neighbors {
        mark[u] = true;
    }
    let mut twice = 0;
    for &u in neighbors {
        twice += g.neighbors(u).iter().filter(|&&w| mark[w]).count();
    }
    for &u in neighbors {
        mark[u] = false;
    }
    twice / 2
}

/// Per-node triangle counts, which equal the edge counts among each node's
/// neighbors. Edges are oriented from lower to higher (degree, id) rank so
/// each triangle is found once.
pub fn triangle_counts(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let rank_less = |a: usize, b: usize| (g.degree(a), a) < (g.degree(b), b);
    let forward: Vec<Vec<usize>> = (0..n)
        .map(|u| g.neighbors(u).iter().copied().filter(|&v| rank_less(u, v)).collect())
        .collect();
    let mut counts = vec![0usize; n];
    let mut mark = vec![false; n];
    for u in 0..n {
        for &v in &forward[u] {
            mark[v] = true;
        }
        for &v in &forward[u] {
            for &w in &forward[v] {
                if mark[w] {
                    counts[u] += 1;
                    counts[v] += 1;
                    counts[w] += 1;
                }
            }
        }
        for &v in &forward[u] {
            mark[v] = false;
        }
    }
    counts
}

fn effective_size_from(degree: usize, ties: usize) -> f64 {
    if degree == 0 {
        0.0
    } else {
        let d = degree as f64;
        d - 2.0 * ties as f64 / d
    }
}

/// Burt's unweighted effective size `d - 2t/d`; 0 for isolated nodes.
pub fn effective_size(g: &Graph, v: usize) -> Result<f64> {
    g.check_node(v)?;
    let mut mark = vec![false; g.node_count()];
    Ok(effective_size_from(g.degree(v), neighbor_edges(g, v, &mut mark)))
}

/// Effective size over degree; 0 for isolated nodes.
pub fn efficiency(g: &Graph, v: usize) -> Result<f64> {
    let es = effective_size(g, v)?;
    Ok(if g.degree(v) == 0 { 0.0 } else { es / g.degree(v) as f64 })
}

fn raw_row(degree: usize, ties: usize) -> [f64; FEATURE_DIM] {
    let es = effective_size_from(degree, ties);
    let eff = if degree == 0 { 0.0 } else { es / degree as f64 };
    [es, eff, degree as f64]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub mean: f64,
    pub std: f64,
}

/// Raw per-node features, their per-column statistics, and the z-scored matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    raw: Vec<[f64; FEATURE_DIM]>,
    stats: [ColumnStats; FEATURE_DIM],
    normalized: Array2<f64>,
}

impl FeatureMatrix {
    pub fn from_raw(raw: Vec<[f64; FEATURE_DIM]>) -> Self {
        let mut features = FeatureMatrix {
            normalized: Array2::zeros((raw.len(), FEATURE_DIM)),
            raw,
            stats: [ColumnStats { mean: 0.0, std: 0.0 }; FEATURE_DIM],
        };
        features.renormalize();
        features
    }

    /// Recomputes the column statistics and the normalized matrix.
    /// A zero-variance column normalizes to all zeros.
    pub fn renormalize(&mut self) {
        let n = self.raw.len();
        for col in 0..FEATURE_DIM {
            let (mean, std) = if n == 0 {
                (0.0, 0.0)
            } else {
                let mean = self.raw.iter().map(|r| r[col]).sum::<f64>() / n as f64;
                let var = self.raw.iter().map(|r| (r[col] - mean).powi(2)).sum::<f64>() / n as f64;
                (mean, var.sqrt())
            };
            self.stats[col] = ColumnStats { mean, std };
            for (row, values) in self.raw.iter().enumerate() {
                self.normalized[[row, col]] = if std > 0.0 { (values[col] - mean) / std } else { 0.0 };
            }
        }
    }

    pub fn raw(&self) -> &[[f64; FEATURE_DIM]] {
        &self.raw
    }

    pub fn stats(&self) -> &[ColumnStats; FEATURE_DIM] {
        &self.stats
    }

    pub fn normalized(&self) -> &Array2<f64> {
        &self.normalized
    }

    pub fn node_count(&self) -> usize {
        self.raw.len()
    }

    /// Maps normalized rows back to raw feature values.
    pub fn denormalize(&self) -> Vec<[f64; FEATURE_DIM]> {
        self.normalized
            .rows()
            .into_iter()
            .map(|row| {
                let mut out = [0.0; FEATURE_DIM];
                for col in 0..FEATURE_DIM {
                    let ColumnStats { mean, std } = self.stats[col];
                    out[col] = if std > 0.0 { row[col] * std + mean } else { mean };
                }
                out
            })
            .collect()
    }

    /// Rows reordered so that old node `j` sits at `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> FeatureMatrix {
        let mut raw = vec![[0.0; FEATURE_DIM]; self.raw.len()];
        for (old, &new) in perm.iter().enumerate() {
            raw[new] = self.raw[old];
        }
        FeatureMatrix::from_raw(raw)
    }

    /// Refreshes the raw rows of `nodes` from `g` without renormalizing.
    pub fn update_rows(&mut self, g: &Graph, nodes: &[usize], mark: &mut [bool]) {
        for &v in nodes {
            self.raw[v] = raw_row(g.degree(v), neighbor_edges(g, v, mark));
        }
    }
}

/// Raw features of every node followed by per-graph z-scoring.
pub fn node_features(g: &Graph) -> FeatureMatrix {
    let ties = triangle_counts(g);
    let raw = (0..g.node_count()).map(|v| raw_row(g.degree(v), ties[v])).collect();
    FeatureMatrix::from_raw(raw)
}

/// Nodes whose one-hop ego network contains the edge `u`–`v`: the endpoints
/// and their common neighbors. Only these rows change when the edge goes away.
pub fn rows_touched_by_edge(g: &Graph, u: usize, v: usize) -> Vec<usize> {
    let mut touched = vec![u, v];
    let (a, b) = (g.neighbors(u), g.neighbors(v));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                touched.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    touched
}
