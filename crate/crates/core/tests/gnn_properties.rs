//! Structural properties of the message-passing model.

mod common;

use std::collections::VecDeque;

use shs_core::centrality::{brandes_bc, label_top_k};
use shs_core::features::node_features;
use shs_core::gnn::{forward, init_params, predict, predict_ranked, train, TrainConfig};
use shs_core::graph::{generate_sf, Graph, SfParams};

fn small_config(layers: usize, hidden: usize) -> TrainConfig {
    TrainConfig {
        layers,
        hidden,
        epochs: 30,
        ..TrainConfig::default()
    }
}

fn hop_distances(g: &Graph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for &w in g.neighbors(u) {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

#[test]
fn predictions_permute_with_nodes() {
    let g = generate_sf(100, SfParams::default(), 11).unwrap();
    let x = node_features(&g);
    let labels = label_top_k(&brandes_bc(&g), 10.0).unwrap();
    let params = train(&g, x.normalized().view(), &labels.labels, &small_config(4, 32))
        .unwrap()
        .params;
    let base = predict(&params, &g, x.normalized().view()).unwrap().scores.values;

    for seed in 0..10 {
        let perm = common::random_perm(g.node_count(), 500 + seed);
        let pg = g.permute_nodes(&perm).unwrap();
        let px = node_features(&pg);
        let permuted = predict(&params, &pg, px.normalized().view()).unwrap().scores.values;
        let worst = (0..g.node_count())
            .map(|old| (permuted[perm[old]] - base[old]).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "perm seed {seed}: max abs diff {worst:e}");
    }
}

#[test]
fn receptive_field_is_the_l_hop_neighborhood() {
    for layers in 1..=3 {
        let g = common::random_tree(60, 40 + layers as u64);
        let x = node_features(&g).normalized().clone();
        let params = init_params(&small_config(layers, 8), 3).unwrap();
        let base = forward(&params, &g, x.view()).unwrap();
        for center in [0usize, 17, 42] {
            let dist = hop_distances(&g, center);
            let mut changed = x.clone();
            let mut far = 0;
            for (v, d) in dist.iter().enumerate() {
                if d.is_none_or(|d| d > layers) {
                    changed.row_mut(v).mapv_inplace(|z| z * -3.0 + 1.5);
                    far += 1;
                }
            }
            assert!(far > 0);
            let after = forward(&params, &g, changed.view()).unwrap();
            assert_eq!(
                base.logits.row(center),
                after.logits.row(center),
                "L={layers} center={center}"
            );
            assert_eq!(base.probs.row(center), after.probs.row(center));
        }
    }
}

#[test]
fn receptive_field_reaches_exactly_l_hops() {
    // Sanity for the test above: a change exactly L hops away is visible.
    let layers = 2;
    let edges: Vec<(usize, usize)> = (0..9).map(|i| (i, i + 1)).collect();
    let g = Graph::from_edges(10, &edges).unwrap();
    let mut x = ndarray::Array2::<f64>::zeros((10, 3));
    x.row_mut(2).fill(1.0);
    let params = init_params(&small_config(layers, 8), 5).unwrap();
    let mut moved = x.clone();
    moved.row_mut(2).fill(-1.0);
    let a = forward(&params, &g, x.view()).unwrap();
    let b = forward(&params, &g, moved.view()).unwrap();
    assert_ne!(a.logits.row(0), b.logits.row(0));
}

#[test]
fn forward_is_bitwise_deterministic() {
    let g = generate_sf(150, SfParams::default(), 9).unwrap();
    let x = node_features(&g);
    let params = init_params(&small_config(3, 16), 21).unwrap();
    let a = forward(&params, &g, x.normalized().view()).unwrap();
    let b = forward(&params, &g, x.normalized().view()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn probabilities_are_complementary() {
    let g = generate_sf(200, SfParams::default(), 4).unwrap();
    let x = node_features(&g);
    let params = init_params(&small_config(2, 16), 1).unwrap();
    let trace = forward(&params, &g, x.normalized().view()).unwrap();
    for row in trace.probs.rows() {
        assert!((row.sum() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn ranked_mode_emits_exact_count() {
    let g = generate_sf(333, SfParams::default(), 8).unwrap();
    let x = node_features(&g);
    let params = init_params(&small_config(2, 16), 2).unwrap();
    let p = predict_ranked(&params, &g, x.normalized().view(), 5.0).unwrap();
    assert_eq!(p.labels.positives(), 17);
}

#[test]
fn training_descends_on_sf_200() {
    let g = generate_sf(200, SfParams::default(), 77).unwrap();
    let x = node_features(&g);
    let labels = label_top_k(&brandes_bc(&g), 5.0).unwrap();
    let cfg = TrainConfig {
        epochs: 50,
        layers: 2,
        hidden: 32,
        ..TrainConfig::default()
    };
    let a = train(&g, x.normalized().view(), &labels.labels, &cfg).unwrap();
    let b = train(&g, x.normalized().view(), &labels.labels, &cfg).unwrap();
    assert!(a.losses.iter().all(|l| l.is_finite()));
    assert!(a.losses.last().unwrap() < a.losses.first().unwrap());
    assert_eq!(a.losses, b.losses);
}
