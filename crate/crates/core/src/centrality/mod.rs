//! Exact betweenness, baseline centralities, and top-k% labeling.

mod baselines;
mod betweenness;
mod labels;

pub use baselines::{closeness, constraint, ISOLATED_CONSTRAINT};
pub use betweenness::{bc_bruteforce, brandes_bc, BRUTEFORCE_NODE_LIMIT};
pub use labels::{accuracy, baseline_predict, label_top_k, rank_nodes, top_k_count, LabelVector, Metrics, RankOrder};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScoreKind {
    Bc,
    Closeness,
    Constraint,
    ProbShs,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector {
    pub kind: ScoreKind,
    pub values: Vec<f64>,
}

impl ScoreVector {
    pub fn new(kind: ScoreKind, values: Vec<f64>) -> Self {
        ScoreVector { kind, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Scores reordered so that old node `j` sits at `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> ScoreVector {
        let mut values = vec![0.0; self.values.len()];
        for (old, &new) in perm.iter().enumerate() {
            values[new] = self.values[old];
        }
        ScoreVector::new(self.kind, values)
    }
}
