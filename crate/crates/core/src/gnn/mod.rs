//! The message-passing spanner classifier.
//!
//! Each layer concatenates a node's previous embedding with the degree-
//! normalized sum of its neighbors' embeddings, applies a dense map and a
//! ReLU. A two-logit softmax head turns the final embedding into
//! `P(SHS)`. Gradients are derived by hand for this fixed architecture.

mod adam;
mod backward;
mod checkpoint;
mod forward;
mod train;

pub use adam::{adam_step, AdamState};
pub use backward::{backward, bce_loss, loss_and_grad, Supervision, PROB_CLAMP};
pub use checkpoint::{checkpoint_text, parse_checkpoint, read_checkpoint, write_checkpoint, Checkpoint};
pub use forward::{aggregate, aggregate_adjoint, forward, infer_logits, ForwardTrace};
pub use train::{predict, predict_ranked, train, train_many, Prediction, TrainOutcome, TrainingGraph};

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ShsError};
use crate::features::FEATURE_DIM;

/// A dense map `x -> W x + b` with `W` stored as `out × in`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    pub fn zeros(out_dim: usize, in_dim: usize) -> Self {
        Dense {
            weight: Array2::zeros((out_dim, in_dim)),
            bias: Array1::zeros(out_dim),
        }
    }

    pub fn out_dim(&self) -> usize {
        self.weight.nrows()
    }

    pub fn in_dim(&self) -> usize {
        self.weight.ncols()
    }
}

/// Trainable state: `L` message-passing layers and the output head.
///
/// Layer 1 maps `2 * input_dim` to `hidden`, later layers `2 * hidden` to
/// `hidden`, and the head maps `hidden` to the two class logits. The same
/// type doubles as the gradient record.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub layers: Vec<Dense>,
    pub head: Dense,
}

impl ModelParams {
    pub fn zeros(input_dim: usize, layers: usize, hidden: usize) -> Result<Self> {
        if layers == 0 || hidden == 0 || input_dim == 0 {
            return Err(ShsError::invalid("model needs at least one layer and positive widths"));
        }
        let layers = (0..layers)
            .map(|l| Dense::zeros(hidden, 2 * if l == 0 { input_dim } else { hidden }))
            .collect();
        Ok(ModelParams {
            layers,
            head: Dense::zeros(2, hidden),
        })
    }

    pub fn zeros_like(&self) -> Self {
        let shape = |d: &Dense| Dense::zeros(d.out_dim(), d.in_dim());
        ModelParams {
            layers: self.layers.iter().map(shape).collect(),
            head: shape(&self.head),
        }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn hidden(&self) -> usize {
        self.head.in_dim()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim() / 2
    }

    fn denses(&self) -> impl Iterator<Item = &Dense> {
        self.layers.iter().chain(std::iter::once(&self.head))
    }

    fn denses_mut(&mut self) -> impl Iterator<Item = &mut Dense> {
        self.layers.iter_mut().chain(std::iter::once(&mut self.head))
    }

    /// Every tensor as a flat slice, weights before biases, layers then head.
    pub fn tensors(&self) -> Vec<&[f64]> {
        self.denses()
            .flat_map(|d| {
                [
                    d.weight.as_slice().expect("standard layout"),
                    d.bias.as_slice().expect("standard layout"),
                ]
            })
            .collect()
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        self.denses_mut()
            .flat_map(|d| {
                [
                    d.weight.as_slice_mut().expect("standard layout"),
                    d.bias.as_slice_mut().expect("standard layout"),
                ]
            })
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// `self += scale * other`, element by element.
    pub fn axpy(&mut self, scale: f64, other: &ModelParams) {
        for (dst, src) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += scale * s;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|x| *x *= factor);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }

    /// Squared Frobenius norm of the weight matrices (biases excluded).
    pub fn weight_norm_sq(&self) -> f64 {
        self.denses().map(|d| d.weight.iter().map(|w| w * w).sum::<f64>()).sum()
    }

    /// Adds the gradient of `decay * ||W||^2`, i.e. `2 * decay * W`, to the weights.
    pub fn add_weight_decay(&mut self, params: &ModelParams, decay: f64) {
        if decay == 0.0 {
            return;
        }
        for (g, p) in self.denses_mut().zip(params.denses()) {
            g.weight.scaled_add(2.0 * decay, &p.weight);
        }
    }

    /// FNV-1a over the bit patterns of every parameter.
    pub fn fingerprint(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for t in self.tensors() {
            hash = (hash ^ t.len() as u64).wrapping_mul(0x0000_0100_0000_01b3);
            for x in t {
                hash = (hash ^ x.to_bits()).wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        hash
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub seed: u64,
    pub layers: usize,
    pub hidden: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            learning_rate: 0.01,
            weight_decay: 5e-4,
            seed: 0,
            layers: 4,
            hidden: 128,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 || self.hidden == 0 {
            return Err(ShsError::invalid("layers and hidden must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) || !(self.weight_decay >= 0.0) {
            return Err(ShsError::invalid(
                "learning rate must be positive and finite, weight decay non-negative",
            ));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) || !(self.adam_eps > 0.0) {
            return Err(ShsError::invalid(
                "Adam betas must lie in [0, 1) and eps must be positive",
            ));
        }
        Ok(())
    }
}

/// Glorot-uniform weights (`|w| <= sqrt(6 / (fan_in + fan_out))`) and zero biases.
pub fn init_params(config: &TrainConfig, seed: u64) -> Result<ModelParams> {
    config.validate()?;
    let mut params = ModelParams::zeros(FEATURE_DIM, config.layers, config.hidden)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for dense in params.denses_mut() {
        let bound = glorot_bound(dense);
        let dist = Uniform::new_inclusive(-bound, bound).map_err(|e| ShsError::invalid(e.to_string()))?;
        dense.weight.iter_mut().for_each(|w| *w = dist.sample(&mut rng));
    }
    Ok(params)
}

pub fn glorot_bound(dense: &Dense) -> f64 {
    (6.0 / (dense.in_dim() + dense.out_dim()) as f64).sqrt()
}
