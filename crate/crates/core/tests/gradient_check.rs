//! Analytic gradients against central finite differences.

mod common;

use ndarray::Array2;
use rand::Rng;
use shs_core::features::node_features;
use shs_core::gnn::{forward, init_params, loss_and_grad, ModelParams, Supervision, TrainConfig};
use shs_core::graph::{generate_er, Graph};

const STEP: f64 = 1e-5;
const TOLERANCE: f64 = 1e-4;
/// Denominator floor so entries with vanishing gradient compare absolutely.
const FLOOR: f64 = 1e-6;
const DECAY: f64 = 5e-4;

struct Instance {
    graph: Graph,
    x: Array2<f64>,
    params: ModelParams,
    nodes: Vec<usize>,
    labels: Vec<bool>,
}

fn objective(inst: &Instance, params: &ModelParams) -> f64 {
    let trace = forward(params, &inst.graph, inst.x.view()).unwrap();
    let sup = Supervision {
        nodes: &inst.nodes,
        labels: &inst.labels,
    };
    sup.loss(&trace).unwrap() + DECAY * params.weight_norm_sq()
}

/// Smallest |pre-activation|; finite differences are meaningless near a ReLU kink.
fn kink_margin(inst: &Instance) -> f64 {
    let trace = forward(&inst.params, &inst.graph, inst.x.view()).unwrap();
    trace
        .layers
        .iter()
        .flat_map(|l| l.pre_activation.iter().map(|z| z.abs()))
        .fold(f64::INFINITY, f64::min)
}

fn instance(seed: u64, layers: usize, hidden: usize) -> Instance {
    let mut attempt = 0;
    loop {
        let s = seed * 1000 + attempt;
        let mut rng = common::rng(s);
        let n = rng.random_range(6..=20);
        let graph = generate_er(n, 0.25, s).unwrap();
        let x = node_features(&graph).normalized().clone();
        let cfg = TrainConfig {
            layers,
            hidden,
            ..TrainConfig::default()
        };
        let mut params = init_params(&cfg, s).unwrap();
        // Non-zero biases so every bias gradient is exercised.
        for t in params.tensors_mut() {
            if t.len() <= hidden {
                t.iter_mut().for_each(|b| *b = rng.random_range(-0.2..0.2));
            }
        }
        let nodes: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.7)).collect();
        let labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.3)).collect();
        let inst = Instance {
            graph,
            x,
            params,
            nodes,
            labels,
        };
        if !inst.nodes.is_empty() && kink_margin(&inst) > 1e-3 {
            return inst;
        }
        attempt += 1;
    }
}

fn max_relative_error(inst: &Instance) -> f64 {
    let sup = Supervision {
        nodes: &inst.nodes,
        labels: &inst.labels,
    };
    let (_, analytic) = loss_and_grad(&inst.params, &inst.graph, inst.x.view(), sup, DECAY).unwrap();
    let analytic: Vec<f64> = analytic.tensors().concat();

    let mut worst: f64 = 0.0;
    let mut probe = inst.params.clone();
    let mut flat_index = 0;
    let sizes: Vec<usize> = inst.params.tensors().iter().map(|t| t.len()).collect();
    for (t, &size) in sizes.iter().enumerate() {
        for i in 0..size {
            let original = probe.tensors()[t][i];
            probe.tensors_mut()[t][i] = original + STEP;
            let up = objective(inst, &probe);
            probe.tensors_mut()[t][i] = original - STEP;
            let down = objective(inst, &probe);
            probe.tensors_mut()[t][i] = original;
            let numeric = (up - down) / (2.0 * STEP);
            let a = analytic[flat_index];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(FLOOR);
            worst = worst.max(rel);
            flat_index += 1;
        }
    }
    worst
}

#[test]
fn backward_matches_finite_differences() {
    let mut count = 0;
    for (i, layers) in [1usize, 2, 4].into_iter().enumerate() {
        for (j, hidden) in [4usize, 16].into_iter().enumerate() {
            for rep in 0..4 {
                let seed = (i * 100 + j * 10 + rep) as u64;
                let inst = instance(seed, layers, hidden);
                let err = max_relative_error(&inst);
                assert!(
                    err < TOLERANCE,
                    "L={layers} hidden={hidden} seed={seed}: relative error {err:e}"
                );
                count += 1;
            }
        }
    }
    assert!(count >= 20);
}
