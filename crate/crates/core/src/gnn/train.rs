use ndarray::ArrayView2;

use super::adam::{adam_step, AdamState};
use super::backward::{loss_and_grad, Supervision};
use super::forward::{infer_logits, probs_from_logits};
use super::{init_params, ModelParams, TrainConfig};
use crate::centrality::{baseline_predict, LabelVector, ScoreKind, ScoreVector};
use crate::error::{Result, ShsError};
use crate::graph::Graph;

/// A fully labeled training graph.
#[derive(Clone, Copy, Debug)]
pub struct TrainingGraph<'a> {
    pub graph: &'a Graph,
    pub features: ArrayView2<'a, f64>,
    pub labels: &'a [bool],
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub params: ModelParams,
    /// Cross-entropy at the start of each epoch, before that epoch's update.
    pub losses: Vec<f64>,
}

pub fn train(g: &Graph, x: ArrayView2<f64>, labels: &[bool], config: &TrainConfig) -> Result<TrainOutcome> {
    train_many(
        &[TrainingGraph {
            graph: g,
            features: x,
            labels,
        }],
        config,
    )
}

/// Full-batch Adam over the union of several labeled graphs. The loss is the
/// mean over all nodes of all graphs, so each graph weighs by its size.
pub fn train_many(graphs: &[TrainingGraph<'_>], config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    if graphs.is_empty() {
        return Err(ShsError::NoLabeledNodes);
    }
    let node_lists: Vec<Vec<usize>> = graphs.iter().map(|t| (0..t.graph.node_count()).collect()).collect();
    let total: usize = node_lists.iter().map(Vec::len).sum();
    if total == 0 {
        return Err(ShsError::NoLabeledNodes);
    }

    let mut params = init_params(config, config.seed)?;
    let mut state = AdamState::new(&params);
    let mut losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let mut grads = params.zeros_like();
        let mut loss = 0.0;
        for (t, nodes) in graphs.iter().zip(&node_lists) {
            let share = nodes.len() as f64 / total as f64;
            let supervision = Supervision {
                nodes,
                labels: t.labels,
            };
            let (l, g) = loss_and_grad(&params, t.graph, t.features, supervision, 0.0)?;
            loss += share * l;
            grads.axpy(share, &g);
        }
        if !loss.is_finite() {
            return Err(ShsError::NonFinite(format!("training loss at epoch {epoch}")));
        }
        grads.add_weight_decay(&params, config.weight_decay);
        adam_step(&mut params, &grads, &mut state, config);
        losses.push(loss);
    }
    if !params.is_finite() {
        return Err(ShsError::NonFinite("trained parameters".into()));
    }
    Ok(TrainOutcome { params, losses })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    /// `P(SHS)` per node.
    pub scores: ScoreVector,
    pub labels: LabelVector,
}

/// Probabilities plus argmax labels (SHS when its logit is strictly larger).
pub fn predict(params: &ModelParams, g: &Graph, x: ArrayView2<f64>) -> Result<Prediction> {
    let logits = infer_logits(params, g, x)?;
    let probs = probs_from_logits(&logits);
    let labels = logits.rows().into_iter().map(|row| row[1] > row[0]).collect();
    Ok(Prediction {
        scores: ScoreVector::new(ScoreKind::ProbShs, probs.column(1).to_vec()),
        labels: LabelVector::unranked(labels),
    })
}

/// Probabilities plus the `ceil(k * n / 100)` most probable spanners.
pub fn predict_ranked(params: &ModelParams, g: &Graph, x: ArrayView2<f64>, k_percent: f64) -> Result<Prediction> {
    let Prediction { scores, .. } = predict(params, g, x)?;
    let labels = baseline_predict(&scores, k_percent, None)?;
    Ok(Prediction { scores, labels })
}
