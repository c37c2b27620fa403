//! Simple undirected graphs in compressed adjacency form.
//!
//! Nodes are the ids `0..n`. Every neighbor list is sorted ascending and free
//! of duplicates, and the adjacency is symmetric. A [`Graph`] never changes
//! after construction; [`Graph::delete_edge`] and [`Graph::permute_nodes`]
//! return new graphs.

mod edgelist;
mod generate;

pub use edgelist::{read_edgelist, read_edgelist_dense, write_edgelist, write_idmap, LoadedGraph};
pub use generate::{
    generate, generate_er, generate_grp, generate_grp_partitioned, generate_sf, GeneratorSpec, GrpParams, Partitioned,
    SfParams,
};

use crate::error::{Result, ShsError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Graph {
    /// Builds a simple graph, silently dropping self-loops and repeated pairs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(ShsError::NodeOutOfRange { u, v, n });
            }
        }
        Ok(Self::from_edges_unchecked(n, edges.iter().copied()))
    }

    pub(crate) fn from_edges_unchecked(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        Self::from_adjacency(adjacency)
    }

    fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(adjacency.iter().map(Vec::len).sum());
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Graph { offsets, targets }
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && v < self.node_count() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Canonical edge list: `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|v| self.degree(v)).collect()
    }

    pub fn check_node(&self, v: usize) -> Result<()> {
        if v < self.node_count() {
            Ok(())
        } else {
            Err(ShsError::InvalidNode {
                node: v,
                n: self.node_count(),
            })
        }
    }

    /// Returns a copy of the graph without the edge `u`–`v`.
    pub fn delete_edge(&self, u: usize, v: usize) -> Result<Graph> {
        if !self.has_edge(u, v) {
            return Err(ShsError::MissingEdge { u, v });
        }
        let mut offsets = Vec::with_capacity(self.offsets.len());
        let mut targets = Vec::with_capacity(self.targets.len() - 2);
        offsets.push(0);
        for x in 0..self.node_count() {
            let drop = if x == u {
                Some(v)
            } else if x == v {
                Some(u)
            } else {
                None
            };
            match drop {
                Some(y) => targets.extend(self.neighbors(x).iter().copied().filter(|&w| w != y)),
                None => targets.extend_from_slice(self.neighbors(x)),
            }
            offsets.push(targets.len());
        }
        Ok(Graph { offsets, targets })
    }

    /// Relabels nodes: old node `j` becomes `perm[j]`.
    pub fn permute_nodes(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.node_count();
        check_bijection(perm, n)?;
        let mut adjacency = vec![Vec::new(); n];
        for old in 0..n {
            adjacency[perm[old]] = self.neighbors(old).iter().map(|&j| perm[j]).collect();
        }
        Ok(Self::from_adjacency(adjacency))
    }

    /// Checks symmetry, simplicity and sorted adjacency.
    pub fn validate(&self) -> Result<()> {
        let n = self.node_count();
        if self.offsets[0] != 0 || *self.offsets.last().unwrap_or(&0) != self.targets.len() {
            return Err(ShsError::invalid("offset table does not cover the target array"));
        }
        if !self.targets.len().is_multiple_of(2) {
            return Err(ShsError::invalid("odd adjacency total; graph is not symmetric"));
        }
        for v in 0..n {
            let list = self.neighbors(v);
            for (idx, &w) in list.iter().enumerate() {
                if w >= n {
                    return Err(ShsError::InvalidNode { node: w, n });
                }
                if w == v {
                    return Err(ShsError::invalid(format!("self-loop at node {v}")));
                }
                if idx > 0 && list[idx - 1] >= w {
                    return Err(ShsError::invalid(format!(
                        "neighbor list of node {v} is not strictly ascending"
                    )));
                }
                if self.neighbors(w).binary_search(&v).is_err() {
                    return Err(ShsError::invalid(format!("edge {v}->{w} has no reverse")));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn check_bijection(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(ShsError::NotBijection { n });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(ShsError::NotBijection { n });
        }
    }
    Ok(())
}

/// Inverse of a bijection on `0..n`.
pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}
