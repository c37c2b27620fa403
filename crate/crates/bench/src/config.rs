use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use shs_core::centrality::RankOrder;
use shs_core::gnn::TrainConfig;
use shs_core::graph::{GeneratorSpec, SfParams};
use shs_core::meta::MetaConfig;

use crate::error::{BenchError, Result};

/// Betweenness above this many nodes needs an explicit override.
pub const DEFAULT_NODE_CAP: usize = 400_000;

/// Where a dataset's graph comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum DatasetSpec {
    Generated { id: String, generator: GeneratorSpec },
    EdgeList { id: String, path: PathBuf },
}

impl DatasetSpec {
    pub fn generated(generator: GeneratorSpec) -> Self {
        let id = format!(
            "{}-{}-s{}",
            generator.family(),
            generator.node_count(),
            generator.seed()
        );
        DatasetSpec::Generated { id, generator }
    }

    pub fn sf(n: usize, seed: u64) -> Self {
        Self::generated(GeneratorSpec::Sf {
            n,
            params: SfParams::default(),
            seed,
        })
    }

    /// ER with the edge probability used for the synthetic benchmarks.
    pub fn er(n: usize, seed: u64) -> Self {
        Self::generated(GeneratorSpec::Er { n, p: 0.001, seed })
    }

    pub fn id(&self) -> &str {
        match self {
            DatasetSpec::Generated { id, .. } | DatasetSpec::EdgeList { id, .. } => id,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Graphshs,
    Meta,
    Constraint,
    Closeness,
    Brandes,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Graphshs,
        Method::Meta,
        Method::Constraint,
        Method::Closeness,
        Method::Brandes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Graphshs => "graphshs",
            Method::Meta => "meta",
            Method::Constraint => "constraint",
            Method::Closeness => "closeness",
            Method::Brandes => "brandes",
        }
    }

    pub fn is_baseline(self) -> bool {
        matches!(self, Method::Constraint | Method::Closeness | Method::Brandes)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| BenchError::config(format!("unknown method {s:?}")))
    }
}

/// Graph family for the synthetic benchmark presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Er,
    Sf,
}

impl FromStr for Family {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "er" => Ok(Family::Er),
            "sf" => Ok(Family::Sf),
            other => Err(BenchError::config(format!(
                "unknown family {other:?} (expected er or sf)"
            ))),
        }
    }
}

/// Desk scale runs in CI; paper scale restores the original graph sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Desk,
    Paper,
}

impl Scale {
    pub fn from_flag(paper_scale: bool) -> Self {
        if paper_scale {
            Scale::Paper
        } else {
            Scale::Desk
        }
    }

    pub fn train_nodes(self) -> usize {
        match self {
            Scale::Desk => 1000,
            Scale::Paper => 5000,
        }
    }

    pub fn test_nodes(self) -> Vec<usize> {
        match self {
            Scale::Desk => vec![1000; 3],
            Scale::Paper => vec![5000, 10_000, 20_000, 50_000],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub train: DatasetSpec,
    pub tests: Vec<DatasetSpec>,
    pub k_percents: Vec<f64>,
    pub methods: Vec<Method>,
    pub model: TrainConfig,
    pub meta: MetaConfig,
    pub seeds: Vec<u64>,
    /// Timed sections run this many times; the fastest run is reported.
    pub repeat: usize,
    /// Count feature extraction as part of GraphSHS inference time.
    pub include_features: bool,
    pub constraint_order: RankOrder,
    pub node_cap: usize,
    pub force: bool,
}

impl ExperimentConfig {
    /// Train on one graph of `family`, test on fresh graphs of the same family.
    pub fn preset(scale: Scale, family: Family, seed: u64) -> Self {
        let make = |n, s| match family {
            Family::Er => DatasetSpec::er(n, s),
            Family::Sf => DatasetSpec::sf(n, s),
        };
        let tests = scale
            .test_nodes()
            .into_iter()
            .enumerate()
            .map(|(i, n)| make(n, seed + 1 + i as u64))
            .collect();
        ExperimentConfig {
            train: make(scale.train_nodes(), seed),
            tests,
            k_percents: vec![5.0, 10.0, 20.0],
            methods: vec![Method::Graphshs, Method::Constraint, Method::Closeness, Method::Brandes],
            model: TrainConfig {
                seed,
                ..TrainConfig::default()
            },
            meta: MetaConfig {
                seed,
                ..MetaConfig::default()
            },
            seeds: vec![seed],
            repeat: 1,
            include_features: false,
            constraint_order: RankOrder::Ascending,
            node_cap: DEFAULT_NODE_CAP,
            force: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(BenchError::config("at least one method is required"));
        }
        if self.k_percents.is_empty() {
            return Err(BenchError::config("at least one k value is required"));
        }
        if let Some(k) = self.k_percents.iter().find(|&&k| !(k > 0.0 && k <= 100.0)) {
            return Err(BenchError::config(format!("k = {k} is outside (0, 100]")));
        }
        if self.repeat == 0 {
            return Err(BenchError::config("repeat must be at least 1"));
        }
        self.model.validate()?;
        Ok(())
    }
}

/// Parses a comma-separated list such as `5,10,20`.
pub fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    text.split(',')
        .map(|item| {
            item.trim()
                .parse()
                .map_err(|e| BenchError::config(format!("bad list item {item:?}: {e}")))
        })
        .collect()
}
