use super::{ScoreKind, ScoreVector};
use crate::graph::Graph;

/// Closeness `1 / sum of distances` over the nodes reachable from each node.
/// Isolated nodes score 0.
pub fn closeness(g: &Graph) -> ScoreVector {
    let n = g.node_count();
    let mut dist = vec![u32::MAX; n];
    let mut queue = Vec::with_capacity(n);
    let mut values = vec![0.0; n];
    for (s, value) in values.iter_mut().enumerate() {
        queue.clear();
        dist[s] = 0;
        queue.push(s);
        let mut head = 0;
        let mut total: u64 = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            for &w in g.neighbors(v) {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    total += dist[w] as u64;
                    queue.push(w);
                }
            }
        }
        *value = if total == 0 { 0.0 } else { 1.0 / total as f64 };
        for &v in &queue {
            dist[v] = u32::MAX;
        }
    }
    ScoreVector::new(ScoreKind::Closeness, values)
}

/// Sentinel constraint for degree-0 nodes: above the 1.0 ceiling of any
/// connected node, so they rank last as spanner candidates.
pub const ISOLATED_CONSTRAINT: f64 = 2.0;

/// Burt's constraint with proportional tie strength `p_ij = 1 / d(i)`:
/// `C(i) = sum_j (p_ij + sum_q p_iq p_qj)^2` over neighbors `j` and common
/// neighbors `q` of `i` and `j`.
pub fn constraint(g: &Graph) -> ScoreVector {
    let n = g.node_count();
    let mut mark = vec![false; n];
    let mut values = vec![0.0; n];
    for (i, value) in values.iter_mut().enumerate() {
        let neighbors = g.neighbors(i);
        if neighbors.is_empty() {
            *value = ISOLATED_CONSTRAINT;
            continue;
        }
        let p_i = 1.0 / neighbors.len() as f64;
        for &j in neighbors {
            mark[j] = true;
        }
        let mut total = 0.0;
        for &j in neighbors {
            // p_iq = p_i for every q in N(i); p_qj = 1 / d(q).
            let indirect: f64 = g
                .neighbors(j)
                .iter()
                .filter(|&&q| mark[q])
                .map(|&q| p_i / g.degree(q) as f64)
                .sum();
            let term = p_i + indirect;
            total += term * term;
        }
        for &j in neighbors {
            mark[j] = false;
        }
        *value = total;
    }
    ScoreVector::new(ScoreKind::Constraint, values)
}
