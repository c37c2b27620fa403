use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array2, ArrayView2, Axis};

use super::forward::{aggregate_adjoint, forward, ForwardTrace};
use super::ModelParams;
use crate::error::{Result, ShsError};
use crate::graph::Graph;

/// Probabilities are clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]` before the log.
pub const PROB_CLAMP: f64 = 1e-12;

fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

/// Mean binary cross-entropy of `P(SHS)` against the labels.
pub fn bce_loss(probs: &[f64], labels: &[bool]) -> Result<f64> {
    if probs.len() != labels.len() {
        return Err(ShsError::LengthMismatch {
            left: probs.len(),
            right: labels.len(),
        });
    }
    if probs.is_empty() {
        return Err(ShsError::NoLabeledNodes);
    }
    let total: f64 = probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = clamp_prob(p);
            if y {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum();
    Ok(total / probs.len() as f64)
}

/// Which nodes enter the loss. `labels` covers every node of the graph;
/// `nodes` may repeat ids, each occurrence counting once in the mean.
#[derive(Clone, Copy, Debug)]
pub struct Supervision<'a> {
    pub nodes: &'a [usize],
    pub labels: &'a [bool],
}

impl Supervision<'_> {
    fn check(&self, n: usize) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(ShsError::NoLabeledNodes);
        }
        if self.labels.len() != n {
            return Err(ShsError::LengthMismatch {
                left: self.labels.len(),
                right: n,
            });
        }
        if let Some(&bad) = self.nodes.iter().find(|&&v| v >= n) {
            return Err(ShsError::InvalidNode { node: bad, n });
        }
        Ok(())
    }

    pub fn loss(&self, trace: &ForwardTrace) -> Result<f64> {
        self.check(trace.node_count)?;
        let probs: Vec<f64> = self.nodes.iter().map(|&v| trace.probs[[v, 1]]).collect();
        let labels: Vec<bool> = self.nodes.iter().map(|&v| self.labels[v]).collect();
        bce_loss(&probs, &labels)
    }
}

/// Gradient of the supervised loss plus `weight_decay * ||W||^2`.
///
/// Returns the data loss (without the decay term) and the gradient, which
/// has the same shape as the parameters. The clamp makes the loss flat
/// outside `[PROB_CLAMP, 1 - PROB_CLAMP]`, so clamped nodes contribute no
/// gradient. ReLU uses subgradient 0 at 0.
pub fn backward(
    trace: &ForwardTrace,
    g: &Graph,
    params: &ModelParams,
    supervision: Supervision<'_>,
    weight_decay: f64,
) -> Result<(f64, ModelParams)> {
    if trace.params_fingerprint != params.fingerprint() || trace.node_count != g.node_count() {
        return Err(ShsError::StaleTrace);
    }
    let loss = supervision.loss(trace)?;
    let n = g.node_count();
    let inv_t = 1.0 / supervision.nodes.len() as f64;

    let mut d_logits = Array2::<f64>::zeros((n, 2));
    for &v in supervision.nodes {
        let p = trace.probs[[v, 1]];
        if !(PROB_CLAMP..=1.0 - PROB_CLAMP).contains(&p) {
            continue;
        }
        let y = if supervision.labels[v] { 1.0 } else { 0.0 };
        let d = (p - y) * inv_t;
        d_logits[[v, 1]] += d;
        d_logits[[v, 0]] -= d;
    }

    let mut grads = params.zeros_like();
    general_mat_mul(1.0, &d_logits.t(), &trace.embeddings, 0.0, &mut grads.head.weight);
    grads.head.bias = d_logits.sum_axis(Axis(0));
    let mut d_h = d_logits.dot(&params.head.weight);

    for (l, (dense, layer)) in params.layers.iter().zip(&trace.layers).enumerate().rev() {
        let mut d_pre = d_h;
        d_pre.zip_mut_with(&layer.pre_activation, |d, &z| {
            if z <= 0.0 {
                *d = 0.0
            }
        });
        let width = dense.in_dim() / 2;
        let (mut d_self_w, mut d_agg_w) = grads.layers[l].weight.view_mut().split_at(Axis(1), width);
        general_mat_mul(1.0, &d_pre.t(), &layer.input, 0.0, &mut d_self_w);
        general_mat_mul(1.0, &d_pre.t(), &layer.aggregated, 0.0, &mut d_agg_w);
        grads.layers[l].bias = d_pre.sum_axis(Axis(0));
        if l == 0 {
            break;
        }
        let d_agg = d_pre.dot(&dense.weight.slice(s![.., width..]));
        let mut d_prev = d_pre.dot(&dense.weight.slice(s![.., ..width]));
        d_prev += &aggregate_adjoint(d_agg.view(), g);
        d_h = d_prev;
    }

    grads.add_weight_decay(params, weight_decay);
    Ok((loss, grads))
}

/// Forward then backward in one call.
pub fn loss_and_grad(
    params: &ModelParams,
    g: &Graph,
    x: ArrayView2<f64>,
    supervision: Supervision<'_>,
    weight_decay: f64,
) -> Result<(f64, ModelParams)> {
    let trace = forward(params, g, x)?;
    backward(&trace, g, params, supervision, weight_decay)
}
