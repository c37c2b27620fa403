mod common;

use common::{random_perm, random_tree, small_graphs};
use proptest::prelude::*;
use shs_core::centrality::{bc_bruteforce, brandes_bc, closeness, constraint, label_top_k, ScoreKind, ScoreVector};
use shs_core::features::{effective_size, efficiency, node_features};
use shs_core::graph::{generate_er, Graph};

#[test]
fn brandes_matches_bruteforce_on_random_graphs() {
    for (i, g) in small_graphs(120, 50, 17).iter().enumerate() {
        g.validate().unwrap();
        let fast = brandes_bc(g);
        let slow = bc_bruteforce(g).unwrap();
        for v in 0..g.node_count() {
            assert!(
                (fast.values[v] - slow.values[v]).abs() < 1e-9,
                "graph {i}, node {v}: {} vs {}",
                fast.values[v],
                slow.values[v]
            );
        }
    }
}

/// In a tree, `v` separates the remaining nodes into components; every pair
/// drawn from two different components routes through `v`.
fn tree_pair_counts(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    (0..n)
        .map(|v| {
            let mut seen = vec![false; n];
            seen[v] = true;
            let mut sizes = Vec::new();
            for &start in g.neighbors(v) {
                let mut stack = vec![start];
                seen[start] = true;
                let mut size = 0usize;
                while let Some(x) = stack.pop() {
                    size += 1;
                    for &y in g.neighbors(x) {
                        if !seen[y] {
                            seen[y] = true;
                            stack.push(y);
                        }
                    }
                }
                sizes.push(size);
            }
            let total: usize = sizes.iter().sum();
            let pairs: usize = sizes.iter().map(|s| s * (total - s)).sum::<usize>() / 2;
            pairs as f64
        })
        .collect()
}

#[test]
fn brandes_on_trees_counts_separated_pairs() {
    for seed in 0..60 {
        let n = 2 + (seed as usize * 7) % 39;
        let tree = random_tree(n, seed);
        assert_eq!(tree.edge_count(), n - 1);
        let expected = tree_pair_counts(&tree);
        let got = brandes_bc(&tree).values;
        for v in 0..n {
            assert!((got[v] - expected[v]).abs() < 1e-9, "seed {seed} node {v}");
        }
    }
}

#[test]
fn brandes_is_permutation_equivariant() {
    for (i, g) in small_graphs(20, 60, 5).iter().enumerate() {
        let perm = random_perm(g.node_count(), i as u64);
        let moved = brandes_bc(&g.permute_nodes(&perm).unwrap());
        let expected = brandes_bc(g).permuted(&perm);
        for (a, b) in moved.values.iter().zip(&expected.values) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

fn is_connected(g: &Graph) -> bool {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 0;
    while let Some(v) = stack.pop() {
        count += 1;
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    count == n
}

#[test]
fn closeness_upper_bound_on_connected_graphs() {
    let mut checked = 0;
    for g in small_graphs(80, 40, 23) {
        if !is_connected(&g) {
            continue;
        }
        checked += 1;
        let n = g.node_count();
        let bound = 1.0 / (n - 1) as f64;
        for (v, &cc) in closeness(&g).values.iter().enumerate() {
            assert!(cc <= bound + 1e-15);
            let universal = g.degree(v) == n - 1;
            assert_eq!((cc - bound).abs() < 1e-15, universal, "node {v}");
        }
    }
    assert!(checked > 10);
}

#[test]
fn leaves_have_unit_constraint() {
    for g in small_graphs(40, 50, 31) {
        let c = constraint(&g).values;
        for v in 0..g.node_count() {
            if g.degree(v) == 1 {
                assert_eq!(c[v], 1.0);
            }
        }
    }
}

/// Effective size as the sum over neighbors `j` of `1 - sum_q p_iq m_jq`,
/// with `p_iq = 1/d(i)` and `m_jq` the 0/1 tie from `j` to `q`.
fn redundancy_effective_size(g: &Graph, i: usize) -> f64 {
    let n = g.node_count();
    let d = g.degree(i);
    if d == 0 {
        return 0.0;
    }
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    let p = 1.0 / d as f64;
    g.neighbors(i)
        .iter()
        .map(|&j| {
            let redundancy: f64 = g
                .neighbors(i)
                .iter()
                .filter(|&&q| q != j)
                .map(|&q| if adj[j][q] { p } else { 0.0 })
                .sum();
            1.0 - redundancy
        })
        .sum()
}

#[test]
fn effective_size_closed_form_matches_redundancy_sum() {
    for g in small_graphs(50, 30, 41) {
        for v in 0..g.node_count() {
            let closed = effective_size(&g, v).unwrap();
            assert!((closed - redundancy_effective_size(&g, v)).abs() < 1e-9);
            if g.degree(v) >= 1 {
                assert!(closed >= 1.0 - 1e-12 && closed <= g.degree(v) as f64 + 1e-12);
                let eff = efficiency(&g, v).unwrap();
                assert!(eff > 0.0 && eff <= 1.0 + 1e-12);
            }
        }
    }
}

#[test]
fn clique_k5() {
    let edges: Vec<_> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
    let k5 = Graph::from_edges(5, &edges).unwrap();
    assert!((effective_size(&k5, 2).unwrap() - 1.0).abs() < 1e-12);
    assert!((efficiency(&k5, 2).unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn features_are_equivariant_and_invertible() {
    for (i, g) in small_graphs(20, 60, 3).iter().enumerate() {
        let f = node_features(g);
        let perm = random_perm(g.node_count(), 100 + i as u64);
        let moved = node_features(&g.permute_nodes(&perm).unwrap());
        for old in 0..g.node_count() {
            assert_eq!(moved.raw()[perm[old]], f.raw()[old]);
            for c in 0..3 {
                let diff = moved.normalized()[[perm[old], c]] - f.normalized()[[old, c]];
                assert!(diff.abs() < 1e-9);
            }
        }
        for (back, raw) in f.denormalize().iter().zip(f.raw()) {
            for c in 0..3 {
                assert!((back[c] - raw[c]).abs() < 1e-9);
            }
        }
        let norm = f.normalized();
        for c in 0..3 {
            let col = norm.column(c);
            let mean = col.sum() / col.len() as f64;
            let std = (col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / col.len() as f64).sqrt();
            assert!(mean.abs() < 1e-9);
            assert!(std == 0.0 || (std - 1.0).abs() < 1e-9);
        }
    }
}

proptest! {
    #[test]
    fn top_k_has_exact_count_and_is_rank_invariant(
        values in prop::collection::vec(-1e6f64..1e6, 1..200),
        k in 0.5f64..100.0,
    ) {
        let n = values.len();
        let labels = label_top_k(&ScoreVector::new(ScoreKind::Bc, values.clone()), k).unwrap();
        let expected = ((k * n as f64 / 100.0) - 1e-9).ceil().max(1.0) as usize;
        prop_assert_eq!(labels.positives(), expected.min(n));
        // strictly increasing transform
        let transformed: Vec<f64> = values.iter().map(|v| (v / 1e6).exp() * 3.0 + 1.0).collect();
        let again = label_top_k(&ScoreVector::new(ScoreKind::Bc, transformed), k).unwrap();
        prop_assert_eq!(labels.labels, again.labels);
    }

    #[test]
    fn er_graphs_are_valid(n in 2usize..80, p in 0.0f64..1.0, seed in any::<u64>()) {
        let g = generate_er(n, p, seed).unwrap();
        prop_assert!(g.validate().is_ok());
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    }
}
