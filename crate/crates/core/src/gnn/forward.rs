use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array2, ArrayView2, Axis};

use super::ModelParams;
use crate::error::{Result, ShsError};
use crate::graph::Graph;

/// Row `i` becomes the mean of the rows of `i`'s neighbors, or zeros when
/// `i` is isolated.
pub fn aggregate(h: ArrayView2<f64>, g: &Graph) -> Result<Array2<f64>> {
    let n = g.node_count();
    if h.nrows() != n {
        return Err(ShsError::Shape(format!("{} embedding rows for {n} nodes", h.nrows())));
    }
    let mut out = Array2::zeros(h.raw_dim());
    for (i, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
        let neighbors = g.neighbors(i);
        if neighbors.is_empty() {
            continue;
        }
        for &j in neighbors {
            row += &h.row(j);
        }
        let degree = neighbors.len() as f64;
        row.mapv_inplace(|x| x / degree);
    }
    Ok(out)
}

/// Adjoint of [`aggregate`]: row `i` of `upstream` is scattered to each
/// neighbor `j` with weight `1 / d(i)`.
pub fn aggregate_adjoint(upstream: ArrayView2<f64>, g: &Graph) -> Array2<f64> {
    let mut out = Array2::zeros(upstream.raw_dim());
    for i in 0..g.node_count() {
        let neighbors = g.neighbors(i);
        if neighbors.is_empty() {
            continue;
        }
        let scaled = upstream.row(i).mapv(|x| x / neighbors.len() as f64);
        for &j in neighbors {
            let mut target = out.row_mut(j);
            target += &scaled;
        }
    }
    out
}

/// Intermediate values of one layer, kept for the backward pass. The layer
/// input is `[input | aggregated]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerTrace {
    pub input: Array2<f64>,
    pub aggregated: Array2<f64>,
    pub pre_activation: Array2<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForwardTrace {
    pub layers: Vec<LayerTrace>,
    /// Final embeddings `z`.
    pub embeddings: Array2<f64>,
    pub logits: Array2<f64>,
    /// Softmax over the two classes; column 1 is `P(SHS)`.
    pub probs: Array2<f64>,
    pub(crate) params_fingerprint: u64,
    pub(crate) node_count: usize,
}

impl ForwardTrace {
    pub fn prob_shs(&self) -> Vec<f64> {
        self.probs.column(1).to_vec()
    }
}

fn check_shapes(params: &ModelParams, g: &Graph, x: ArrayView2<f64>) -> Result<()> {
    if x.nrows() != g.node_count() {
        return Err(ShsError::Shape(format!(
            "{} feature rows for {} nodes",
            x.nrows(),
            g.node_count()
        )));
    }
    if x.ncols() != params.input_dim() {
        return Err(ShsError::Shape(format!(
            "model expects {} input features, got {}",
            params.input_dim(),
            x.ncols()
        )));
    }
    Ok(())
}

/// `[h | aggregate(h)] W^T + b`, computed as two products against the
/// column halves of `W` so the concatenation is never materialized.
fn layer_step(dense: &super::Dense, h: ArrayView2<f64>, g: &Graph) -> Result<(Array2<f64>, Array2<f64>)> {
    let agg = aggregate(h, g)?;
    let width = h.ncols();
    let mut pre = Array2::zeros((h.nrows(), dense.out_dim()));
    for mut row in pre.rows_mut() {
        row.assign(&dense.bias);
    }
    general_mat_mul(1.0, &h, &dense.weight.slice(s![.., ..width]).t(), 1.0, &mut pre);
    general_mat_mul(1.0, &agg, &dense.weight.slice(s![.., width..]).t(), 1.0, &mut pre);
    Ok((agg, pre))
}

fn relu(z: f64) -> f64 {
    if z > 0.0 {
        z
    } else {
        0.0
    }
}

fn head_logits(params: &ModelParams, z: ArrayView2<f64>) -> Array2<f64> {
    let mut logits = Array2::zeros((z.nrows(), 2));
    for mut row in logits.rows_mut() {
        row.assign(&params.head.bias);
    }
    general_mat_mul(1.0, &z, &params.head.weight.t(), 1.0, &mut logits);
    logits
}

fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut probs = logits.clone();
    for mut row in probs.axis_iter_mut(Axis(0)) {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|o| (o - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|e| e / sum);
    }
    probs
}

/// Full forward pass with every intermediate retained.
pub fn forward(params: &ModelParams, g: &Graph, x: ArrayView2<f64>) -> Result<ForwardTrace> {
    check_shapes(params, g, x)?;
    let mut layers = Vec::with_capacity(params.depth());
    let mut h = x.to_owned();
    for dense in &params.layers {
        let (aggregated, pre) = layer_step(dense, h.view(), g)?;
        let next = pre.mapv(relu);
        layers.push(LayerTrace {
            input: std::mem::replace(&mut h, next),
            aggregated,
            pre_activation: pre,
        });
    }
    let logits = head_logits(params, h.view());
    let probs = softmax_rows(&logits);
    Ok(ForwardTrace {
        layers,
        embeddings: h,
        logits,
        probs,
        params_fingerprint: params.fingerprint(),
        node_count: g.node_count(),
    })
}

/// Forward pass for inference only; returns the class logits. Same
/// arithmetic as [`forward`] without retaining intermediates.
pub fn infer_logits(params: &ModelParams, g: &Graph, x: ArrayView2<f64>) -> Result<Array2<f64>> {
    check_shapes(params, g, x)?;
    let mut h = x.to_owned();
    for dense in &params.layers {
        let (_, mut pre) = layer_step(dense, h.view(), g)?;
        pre.mapv_inplace(relu);
        h = pre;
    }
    Ok(head_logits(params, h.view()))
}

pub(crate) fn probs_from_logits(logits: &Array2<f64>) -> Array2<f64> {
    softmax_rows(logits)
}
