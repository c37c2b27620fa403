use std::collections::VecDeque;

use super::{ScoreKind, ScoreVector};
use crate::error::{Result, ShsError};
use crate::graph::Graph;

/// Exact unnormalized betweenness over unordered pairs (Brandes).
///
/// One BFS per source counts shortest paths; dependencies are accumulated in
/// reverse BFS order. Each unordered pair is seen from both endpoints, hence
/// the final halving.
pub fn brandes_bc(g: &Graph) -> ScoreVector {
    let n = g.node_count();
    let mut bc = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut sigma = vec![0.0f64; n];
    let mut delta = vec![0.0f64; n];
    let mut order: Vec<usize> = Vec::with_capacity(n);

    for s in 0..n {
        order.clear();
        dist[s] = 0;
        sigma[s] = 1.0;
        order.push(s);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let next = dist[v] + 1;
            for &w in g.neighbors(v) {
                if dist[w] < 0 {
                    dist[w] = next;
                    order.push(w);
                }
                if dist[w] == next {
                    sigma[w] += sigma[v];
                }
            }
        }

        for &w in order.iter().rev() {
            let coeff = (1.0 + delta[w]) / sigma[w];
            let prev = dist[w] - 1;
            for &v in g.neighbors(w) {
                if dist[v] == prev {
                    delta[v] += sigma[v] * coeff;
                }
            }
            if w != s {
                bc[w] += delta[w];
            }
        }

        for &v in &order {
            dist[v] = -1;
            sigma[v] = 0.0;
            delta[v] = 0.0;
        }
    }

    for value in &mut bc {
        *value /= 2.0;
    }
    ScoreVector::new(ScoreKind::Bc, bc)
}

pub const BRUTEFORCE_NODE_LIMIT: usize = 200;

fn bfs_counts(g: &Graph, source: usize) -> (Vec<i64>, Vec<f64>) {
    let n = g.node_count();
    let mut dist = vec![-1i64; n];
    let mut count = vec![0.0f64; n];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    count[source] = 1.0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] < 0 {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                count[w] += count[v];
            }
        }
    }
    (dist, count)
}

/// Betweenness by direct pair enumeration.
///
/// For every unordered pair `{s, t}` and every `v`, `v` lies on
/// `sigma(s,v) * sigma(v,t)` of the `sigma(s,t)` shortest paths whenever
/// `d(s,v) + d(v,t) = d(s,t)`. Cubic in `n`; refuses graphs above
/// [`BRUTEFORCE_NODE_LIMIT`] nodes.
pub fn bc_bruteforce(g: &Graph) -> Result<ScoreVector> {
    let n = g.node_count();
    if n > BRUTEFORCE_NODE_LIMIT {
        return Err(ShsError::GraphTooLarge {
            n,
            limit: BRUTEFORCE_NODE_LIMIT,
        });
    }
    let tables: Vec<(Vec<i64>, Vec<f64>)> = (0..n).map(|s| bfs_counts(g, s)).collect();
    let mut bc = vec![0.0; n];
    for s in 0..n {
        let (dist_s, count_s) = &tables[s];
        for t in s + 1..n {
            let d_st = dist_s[t];
            if d_st < 0 {
                continue;
            }
            let (dist_t, count_t) = &tables[t];
            let total = count_s[t];
            for v in 0..n {
                if v == s || v == t || dist_s[v] < 0 {
                    continue;
                }
                if dist_s[v] + dist_t[v] == d_st {
                    bc[v] += count_s[v] * count_t[v] / total;
                }
            }
        }
    }
    Ok(ScoreVector::new(ScoreKind::Bc, bc))
}
