//! MAML-style meta-training over a set of labeled task graphs.
//!
//! Each task adapts the shared parameters with plain gradient steps on its
//! support nodes; the shared parameters then move against the sum of the
//! query-set gradients taken at the adapted parameters (first-order rule:
//! the Jacobian of the adaptation is treated as the identity).

mod manifest;

pub use manifest::{load_task_manifest, write_task_manifest, TaskEntry, TaskManifest};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::centrality::{accuracy, rank_nodes, top_k_count, LabelVector, Metrics, RankOrder};
use crate::error::{Result, ShsError};
use crate::features::FeatureMatrix;
use crate::gnn::{init_params, loss_and_grad, predict, ModelParams, Supervision, TrainConfig};
use crate::graph::Graph;

/// Parameter containers the meta-learner can update.
pub trait ParamSpace: Clone {
    fn zeros_like(&self) -> Self;
    /// `self += scale * other`.
    fn axpy(&mut self, scale: f64, other: &Self);
}

impl ParamSpace for ModelParams {
    fn zeros_like(&self) -> Self {
        ModelParams::zeros_like(self)
    }

    fn axpy(&mut self, scale: f64, other: &Self) {
        ModelParams::axpy(self, scale, other)
    }
}

impl ParamSpace for f64 {
    fn zeros_like(&self) -> Self {
        0.0
    }

    fn axpy(&mut self, scale: f64, other: &Self) {
        *self += scale * other;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    Support,
    Query,
}

/// A learning task: a loss and its gradient on either node split.
pub trait MetaTask {
    type Params: ParamSpace;

    fn loss_grad(&self, params: &Self::Params, split: Split) -> Result<(f64, Self::Params)>;
}

/// One labeled graph with disjoint support and query node sets.
#[derive(Clone, Debug)]
pub struct TaskBundle {
    pub id: String,
    pub graph: Graph,
    pub features: FeatureMatrix,
    pub labels: LabelVector,
    pub support: Vec<usize>,
    pub query: Vec<usize>,
}

impl TaskBundle {
    pub fn new(
        id: impl Into<String>,
        graph: Graph,
        features: FeatureMatrix,
        labels: LabelVector,
        support: Vec<usize>,
        query: Vec<usize>,
    ) -> Result<Self> {
        let n = graph.node_count();
        if features.node_count() != n || labels.len() != n {
            return Err(ShsError::Shape(format!(
                "task has {n} nodes, {} feature rows and {} labels",
                features.node_count(),
                labels.len()
            )));
        }
        if support.is_empty() {
            return Err(ShsError::EmptySplit("support"));
        }
        if query.is_empty() {
            return Err(ShsError::EmptySplit("query"));
        }
        let mut in_support = vec![false; n];
        for &v in &support {
            graph.check_node(v)?;
            in_support[v] = true;
        }
        for &v in &query {
            graph.check_node(v)?;
            if in_support[v] {
                return Err(ShsError::invalid(format!("node {v} is in both support and query")));
            }
        }
        Ok(TaskBundle {
            id: id.into(),
            graph,
            features,
            labels,
            support,
            query,
        })
    }

    pub fn nodes(&self, split: Split) -> &[usize] {
        match split {
            Split::Support => &self.support,
            Split::Query => &self.query,
        }
    }
}

impl MetaTask for TaskBundle {
    type Params = ModelParams;

    fn loss_grad(&self, params: &ModelParams, split: Split) -> Result<(f64, ModelParams)> {
        let supervision = Supervision {
            nodes: self.nodes(split),
            labels: &self.labels.labels,
        };
        loss_and_grad(params, &self.graph, self.features.normalized().view(), supervision, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetaConfig {
    pub inner_lr: f64,
    pub meta_lr: f64,
    pub inner_steps: usize,
    pub meta_epochs: usize,
    pub patience: usize,
    pub seed: u64,
    pub fine_tune_steps: usize,
    pub support_ratio: f64,
    /// Only the first-order update is implemented; `false` is rejected.
    pub first_order: bool,
}

impl Default for MetaConfig {
    fn default() -> Self {
        MetaConfig {
            inner_lr: 0.1,
            meta_lr: 0.001,
            inner_steps: 1,
            meta_epochs: 200,
            patience: 20,
            seed: 0,
            fine_tune_steps: 10,
            support_ratio: 0.5,
            first_order: true,
        }
    }
}

impl MetaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.inner_lr >= 0.0) || !(self.meta_lr > 0.0) {
            return Err(ShsError::invalid("inner_lr must be non-negative and meta_lr positive"));
        }
        if self.inner_steps == 0 {
            return Err(ShsError::invalid("inner_steps must be at least 1"));
        }
        if !(self.support_ratio > 0.0 && self.support_ratio < 1.0) {
            return Err(ShsError::invalid("support_ratio must lie in (0, 1)"));
        }
        if !self.first_order {
            return Err(ShsError::invalid("second-order meta-gradients are not supported"));
        }
        Ok(())
    }

    pub fn header(&self) -> Vec<(String, String)> {
        vec![
            ("inner_lr".into(), self.inner_lr.to_string()),
            ("meta_lr".into(), self.meta_lr.to_string()),
            ("inner_steps".into(), self.inner_steps.to_string()),
            ("meta_epochs".into(), self.meta_epochs.to_string()),
            ("patience".into(), self.patience.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("fine_tune_steps".into(), self.fine_tune_steps.to_string()),
            ("support_ratio".into(), self.support_ratio.to_string()),
            ("first_order".into(), self.first_order.to_string()),
        ]
    }
}

/// Stratified random split of `nodes` into support and query sets.
///
/// The support side receives `round(ratio * |nodes|)` nodes, of which
/// `round(ratio * positives)` are SHS where possible. Both sides come back
/// sorted ascending.
pub fn split_support_query(
    nodes: &[usize],
    labels: &[bool],
    ratio: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if nodes.len() < 2 {
        return Err(ShsError::invalid("need at least two labeled nodes to split"));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(ShsError::invalid(format!("split ratio {ratio} is outside (0, 1)")));
    }
    let support_size = (ratio * nodes.len() as f64).round() as usize;
    if support_size == 0 {
        return Err(ShsError::EmptySplit("support"));
    }
    if support_size == nodes.len() {
        return Err(ShsError::EmptySplit("query"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut positives, mut negatives): (Vec<usize>, Vec<usize>) = nodes.iter().partition(|&&v| labels[v]);
    positives.shuffle(&mut rng);
    negatives.shuffle(&mut rng);

    let mut take_pos = ((ratio * positives.len() as f64).round() as usize).min(support_size);
    let mut take_neg = support_size - take_pos;
    if take_neg > negatives.len() {
        take_neg = negatives.len();
        take_pos = support_size - take_neg;
    }
    let mut support: Vec<usize> = positives[..take_pos]
        .iter()
        .chain(&negatives[..take_neg])
        .copied()
        .collect();
    let mut query: Vec<usize> = positives[take_pos..]
        .iter()
        .chain(&negatives[take_neg..])
        .copied()
        .collect();
    support.sort_unstable();
    query.sort_unstable();
    Ok((support, query))
}

/// `steps` plain gradient steps of size `lr` on the support loss.
pub fn inner_adapt<T: MetaTask>(params: &T::Params, task: &T, lr: f64, steps: usize) -> Result<T::Params> {
    if steps == 0 {
        return Err(ShsError::invalid("inner adaptation needs at least one step"));
    }
    let mut adapted = params.clone();
    for _ in 0..steps {
        let (_, grad) = task.loss_grad(&adapted, Split::Support)?;
        adapted.axpy(-lr, &grad);
    }
    Ok(adapted)
}

/// One outer update. Returns the mean query loss at the adapted parameters
/// and the updated shared parameters.
pub fn meta_step<T: MetaTask>(params: &T::Params, tasks: &[T], config: &MetaConfig) -> Result<(f64, T::Params)> {
    let mut grad_sum = params.zeros_like();
    let mut loss_sum = 0.0;
    for task in tasks {
        let adapted = inner_adapt(params, task, config.inner_lr, config.inner_steps)?;
        let (loss, grad) = task.loss_grad(&adapted, Split::Query)?;
        loss_sum += loss;
        grad_sum.axpy(1.0, &grad);
    }
    let mut updated = params.clone();
    updated.axpy(-config.meta_lr, &grad_sum);
    Ok((loss_sum / tasks.len() as f64, updated))
}

#[derive(Clone, Debug)]
pub struct MetaOutcome<P> {
    /// Parameters with the lowest mean query loss seen.
    pub params: P,
    /// Mean query loss per meta-epoch, measured before that epoch's update.
    pub query_losses: Vec<f64>,
    pub best_epoch: usize,
}

/// Outer loop with early stopping on the mean query loss.
pub fn meta_train_from<T: MetaTask>(
    init: T::Params,
    tasks: &[T],
    config: &MetaConfig,
) -> Result<MetaOutcome<T::Params>> {
    config.validate()?;
    if tasks.is_empty() {
        return Err(ShsError::invalid("meta-training needs at least one task"));
    }
    let mut params = init;
    let mut best = params.clone();
    let mut best_loss = f64::INFINITY;
    let mut best_epoch = 0;
    let mut query_losses = Vec::new();
    for epoch in 0..config.meta_epochs {
        let (loss, updated) = meta_step(&params, tasks, config)?;
        if !loss.is_finite() {
            return Err(ShsError::NonFinite(format!("mean query loss at meta-epoch {epoch}")));
        }
        query_losses.push(loss);
        if loss < best_loss {
            best_loss = loss;
            best = params;
            best_epoch = epoch;
        } else if epoch - best_epoch >= config.patience {
            break;
        }
        params = updated;
    }
    Ok(MetaOutcome {
        params: best,
        query_losses,
        best_epoch,
    })
}

/// Meta-trains a freshly initialized model (seeded by `config.seed`).
pub fn meta_train(tasks: &[TaskBundle], config: &MetaConfig, model: &TrainConfig) -> Result<MetaOutcome<ModelParams>> {
    if tasks.len() < 2 {
        return Err(ShsError::invalid("meta-training needs at least two tasks"));
    }
    let init = init_params(model, config.seed)?;
    meta_train_from(init, tasks, config)
}

/// Gradient descent on the support loss from the meta-learned start.
/// Returns the tuned parameters and the support loss before each step and
/// after the last one.
pub fn fine_tune<T: MetaTask>(params: &T::Params, task: &T, lr: f64, steps: usize) -> Result<(T::Params, Vec<f64>)> {
    let mut tuned = params.clone();
    let mut losses = Vec::with_capacity(steps + 1);
    for _ in 0..steps {
        let (loss, grad) = task.loss_grad(&tuned, Split::Support)?;
        losses.push(loss);
        tuned.axpy(-lr, &grad);
    }
    let (loss, _) = task.loss_grad(&tuned, Split::Support)?;
    losses.push(loss);
    Ok((tuned, losses))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum PredictMode {
    Argmax,
    /// Label the `ceil(k * |query| / 100)` most probable query nodes.
    Ranked {
        k_percent: f64,
    },
}

/// Scores the model on the task's query nodes only.
pub fn meta_evaluate(params: &ModelParams, task: &TaskBundle, mode: PredictMode) -> Result<Metrics> {
    let prediction = predict(params, &task.graph, task.features.normalized().view())?;
    let truth: Vec<bool> = task.query.iter().map(|&v| task.labels.labels[v]).collect();
    let pred: Vec<bool> = match mode {
        PredictMode::Argmax => task.query.iter().map(|&v| prediction.labels.labels[v]).collect(),
        PredictMode::Ranked { k_percent } => {
            let scores: Vec<f64> = task.query.iter().map(|&v| prediction.scores.values[v]).collect();
            let count = top_k_count(scores.len(), k_percent);
            let mut pred = vec![false; scores.len()];
            for &i in rank_nodes(&scores, RankOrder::Descending).iter().take(count) {
                pred[i] = true;
            }
            pred
        }
    };
    accuracy(&pred, &truth)
}
