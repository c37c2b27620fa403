#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shs_core::graph::{generate_er, generate_sf, Graph, SfParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_perm(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng(seed));
    perm
}

/// Random labeled tree: node `i > 0` attaches to a uniformly chosen earlier node,
/// then ids are shuffled.
pub fn random_tree(n: usize, seed: u64) -> Graph {
    let mut r = rng(seed);
    let perm = random_perm(n, seed ^ 0x9e37);
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (perm[i], perm[r.random_range(0..i)])).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Mixed ER/SF corpus of small graphs for oracle sweeps.
pub fn small_graphs(count: usize, max_n: usize, seed: u64) -> Vec<Graph> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let n = r.random_range(5..=max_n);
            let s = seed.wrapping_mul(1000).wrapping_add(i as u64);
            if i % 4 == 3 {
                generate_sf(n, SfParams::default(), s).unwrap()
            } else {
                let p = [0.05, 0.1, 0.3][i % 3];
                generate_er(n, p, s).unwrap()
            }
        })
        .collect()
}

/// Task over a generated graph: top-`k`% BC labels, stratified 50/50 split of
/// all nodes.
pub fn bc_task(id: &str, g: Graph, k_percent: f64, split_seed: u64) -> shs_core::meta::TaskBundle {
    use shs_core::centrality::{brandes_bc, label_top_k};
    use shs_core::features::node_features;
    use shs_core::meta::{split_support_query, TaskBundle};

    let labels = label_top_k(&brandes_bc(&g), k_percent).unwrap();
    let features = node_features(&g);
    let nodes: Vec<usize> = (0..g.node_count()).collect();
    let (support, query) = split_support_query(&nodes, &labels.labels, 0.5, split_seed).unwrap();
    TaskBundle::new(id, g, features, labels, support, query).unwrap()
}
