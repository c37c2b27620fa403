//! Seeded synthetic graph families: Erdős–Rényi, directed scale-free growth
//! (symmetrized), and Gaussian random partition graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Result, ShsError};

/// Growth probabilities for the scale-free process.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SfParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for SfParams {
    fn default() -> Self {
        SfParams {
            alpha: 0.4,
            beta: 0.05,
            gamma: 0.55,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrpParams {
    pub mean_size: f64,
    pub shape: f64,
    pub p_in: f64,
    pub p_out: f64,
}

impl Default for GrpParams {
    fn default() -> Self {
        GrpParams {
            mean_size: 100.0,
            shape: 10.0,
            p_in: 0.25,
            p_out: 0.01,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GeneratorSpec {
    Er {
        n: usize,
        p: f64,
        seed: u64,
    },
    Sf {
        n: usize,
        #[serde(flatten)]
        params: SfParams,
        seed: u64,
    },
    Grp {
        n: usize,
        #[serde(flatten)]
        params: GrpParams,
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn node_count(&self) -> usize {
        match *self {
            GeneratorSpec::Er { n, .. } | GeneratorSpec::Sf { n, .. } | GeneratorSpec::Grp { n, .. } => n,
        }
    }

    pub fn seed(&self) -> u64 {
        match *self {
            GeneratorSpec::Er { seed, .. } | GeneratorSpec::Sf { seed, .. } | GeneratorSpec::Grp { seed, .. } => seed,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            GeneratorSpec::Er { .. } => "er",
            GeneratorSpec::Sf { .. } => "sf",
            GeneratorSpec::Grp { .. } => "grp",
        }
    }

    pub fn with_seed(mut self, new_seed: u64) -> Self {
        match &mut self {
            GeneratorSpec::Er { seed, .. } | GeneratorSpec::Sf { seed, .. } | GeneratorSpec::Grp { seed, .. } => {
                *seed = new_seed
            }
        }
        self
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Graph> {
    match *spec {
        GeneratorSpec::Er { n, p, seed } => generate_er(n, p, seed),
        GeneratorSpec::Sf { n, params, seed } => generate_sf(n, params, seed),
        GeneratorSpec::Grp { n, params, seed } => generate_grp(n, params, seed),
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ShsError::invalid(format!("{name} = {p} is not a probability")))
    }
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(ShsError::invalid(format!("need at least 2 nodes, got {n}")));
    }
    Ok(())
}

/// G(n, p): every unordered pair independently with probability `p`.
///
/// Pairs are visited in a fixed linear order and skipped geometrically, which
/// yields the same distribution as one Bernoulli trial per pair.
pub fn generate_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_size(n)?;
    check_probability("p", p)?;
    if p == 0.0 {
        return Ok(Graph::empty(n));
    }
    if p == 1.0 {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        return Ok(Graph::from_edges_unchecked(n, edges));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((v, w as usize));
        }
    }
    Ok(Graph::from_edges_unchecked(n, edges))
}

/// In-degree offset of the growth process; lets nodes without incoming edges be chosen.
const SF_DELTA_IN: f64 = 0.2;

/// Directed scale-free growth from a 3-node directed cycle, symmetrized.
///
/// Each step draws `r`: below `alpha` a new node links to an existing node
/// chosen by in-degree; below `alpha + beta` an edge joins two existing nodes
/// (source by out-degree, target by in-degree); otherwise an existing node
/// chosen by out-degree links to a new node. Parallel edges and self-loops of
/// the directed multigraph collapse away on symmetrization.
pub fn generate_sf(n: usize, params: SfParams, seed: u64) -> Result<Graph> {
    check_size(n)?;
    let SfParams { alpha, beta, gamma } = params;
    for (name, p) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
        check_probability(name, p)?;
    }
    if ((alpha + beta + gamma) - 1.0).abs() > 1e-12 {
        return Err(ShsError::invalid(format!(
            "alpha + beta + gamma = {} must equal 1",
            alpha + beta + gamma
        )));
    }
    if alpha <= 0.0 || gamma <= 0.0 {
        return Err(ShsError::invalid("alpha and gamma must be positive"));
    }

    let mut sources = vec![0usize, 1, 2];
    let mut sinks = vec![1usize, 2, 0];
    if n < 3 {
        return Ok(Graph::from_edges_unchecked(n, [(0, 1)]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = 3usize;
    while nodes < n {
        let r: f64 = rng.random();
        let (src, dst) = if r < alpha {
            let dst = choose_node(&mut rng, &sinks, nodes, SF_DELTA_IN);
            nodes += 1;
            (nodes - 1, dst)
        } else if r < alpha + beta {
            let src = choose_node(&mut rng, &sources, nodes, 0.0);
            let dst = choose_node(&mut rng, &sinks, nodes, SF_DELTA_IN);
            (src, dst)
        } else {
            let src = choose_node(&mut rng, &sources, nodes, 0.0);
            nodes += 1;
            (src, nodes - 1)
        };
        sources.push(src);
        sinks.push(dst);
    }
    Ok(Graph::from_edges_unchecked(n, sources.into_iter().zip(sinks)))
}

/// Picks an endpoint proportionally to `count + delta`, where `count` is the
/// node's multiplicity in `endpoints`.
fn choose_node(rng: &mut impl Rng, endpoints: &[usize], nodes: usize, delta: f64) -> usize {
    if delta > 0.0 {
        let bias = nodes as f64 * delta;
        if rng.random::<f64>() < bias / (bias + endpoints.len() as f64) {
            return rng.random_range(0..nodes);
        }
    }
    endpoints[rng.random_range(0..endpoints.len())]
}

/// A GRP graph together with its group sizes (groups are contiguous id ranges).
#[derive(Clone, Debug)]
pub struct Partitioned {
    pub graph: Graph,
    pub group_sizes: Vec<usize>,
}

pub fn generate_grp(n: usize, params: GrpParams, seed: u64) -> Result<Graph> {
    generate_grp_partitioned(n, params, seed).map(|p| p.graph)
}

/// Gaussian random partition graph.
///
/// Group sizes are drawn from a normal with mean `mean_size` and variance
/// `mean_size / shape`, rounded, redrawn while below 1; the final group is
/// truncated so the sizes sum to `n`.
pub fn generate_grp_partitioned(n: usize, params: GrpParams, seed: u64) -> Result<Partitioned> {
    check_size(n)?;
    let GrpParams {
        mean_size,
        shape,
        p_in,
        p_out,
    } = params;
    check_probability("p_in", p_in)?;
    check_probability("p_out", p_out)?;
    if mean_size < 2.0 || shape <= 0.0 || !mean_size.is_finite() || !shape.is_finite() {
        return Err(ShsError::invalid("GRP needs mean_size >= 2 and shape > 0"));
    }
    if p_out >= p_in {
        return Err(ShsError::invalid(format!(
            "GRP needs p_out < p_in, got {p_out} >= {p_in}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(mean_size, (mean_size / shape).sqrt()).map_err(|e| ShsError::invalid(e.to_string()))?;
    let mut group_sizes = Vec::new();
    let mut total = 0usize;
    while total < n {
        let size = normal.sample(&mut rng).round();
        if size < 1.0 {
            continue;
        }
        let size = size as usize;
        if total + size >= n {
            group_sizes.push(n - total);
            break;
        }
        group_sizes.push(size);
        total += size;
    }

    let mut group_of = Vec::with_capacity(n);
    for (g, &size) in group_sizes.iter().enumerate() {
        group_of.extend(std::iter::repeat_n(g, size));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if group_of[u] == group_of[v] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(Partitioned {
        graph: Graph::from_edges_unchecked(n, edges),
        group_sizes,
    })
}
