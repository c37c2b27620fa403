//! Invariants of graph construction, relabeling, deletion and edge-list I/O.

mod common;

use proptest::prelude::*;
use shs_core::graph::{generate_er, read_edgelist, read_edgelist_dense, write_edgelist, Graph};

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (2usize..40, 0.0f64..0.4, any::<u64>()).prop_map(|(n, p, seed)| generate_er(n, p, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn permutation_composition(g in graph_strategy(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let n = g.node_count();
        let p = common::random_perm(n, s1);
        let q = common::random_perm(n, s2);
        let composed: Vec<usize> = (0..n).map(|j| q[p[j]]).collect();
        let twice = g.permute_nodes(&p).unwrap().permute_nodes(&q).unwrap();
        twice.validate().unwrap();
        prop_assert_eq!(twice, g.permute_nodes(&composed).unwrap());
    }

    #[test]
    fn permutation_preserves_degree_multiset(g in graph_strategy(), s in any::<u64>()) {
        let perm = common::random_perm(g.node_count(), s);
        let pg = g.permute_nodes(&perm).unwrap();
        let mut a = g.degrees();
        let mut b = pg.degrees();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
        prop_assert_eq!(g.edge_count(), pg.edge_count());
    }

    #[test]
    fn delete_edge_removes_exactly_one(g in graph_strategy(), pick in any::<prop::sample::Index>()) {
        let edges: Vec<(usize, usize)> = g.edges().collect();
        prop_assume!(!edges.is_empty());
        let (u, v) = edges[pick.index(edges.len())];
        let h = g.delete_edge(u, v).unwrap();
        h.validate().unwrap();
        prop_assert_eq!(h.edge_count(), g.edge_count() - 1);
        prop_assert!(!h.has_edge(u, v));
        let rest: Vec<(usize, usize)> = edges.iter().copied().filter(|&e| e != (u, v)).collect();
        prop_assert_eq!(h.edges().collect::<Vec<_>>(), rest);
        // The original is untouched and the edge cannot be deleted twice.
        prop_assert!(g.has_edge(u, v));
        prop_assert!(h.delete_edge(u, v).is_err());
    }

    #[test]
    fn edgelist_round_trip(g in graph_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.edges");
        write_edgelist(&g, &path).unwrap();
        let dense = read_edgelist_dense(&path).unwrap();
        prop_assert_eq!(&dense, &g);

        // The first-appearance reader yields the same edges after mapping back.
        let loaded = read_edgelist(&path).unwrap();
        loaded.graph.validate().unwrap();
        let mut mapped: Vec<(usize, usize)> = loaded
            .graph
            .edges()
            .map(|(a, b)| {
                let (x, y) = (loaded.original_ids[a] as usize, loaded.original_ids[b] as usize);
                (x.min(y), x.max(y))
            })
            .collect();
        mapped.sort_unstable();
        prop_assert_eq!(mapped, g.edges().collect::<Vec<_>>());
    }
}

#[test]
fn generators_are_pure_functions_of_their_seed() {
    for seed in 0..5 {
        let a = generate_er(300, 0.02, seed).unwrap();
        let b = generate_er(300, 0.02, seed).unwrap();
        assert_eq!(a, b);
    }
    assert_ne!(generate_er(300, 0.02, 1).unwrap(), generate_er(300, 0.02, 2).unwrap());
}
