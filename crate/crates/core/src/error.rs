use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = ShsError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ShsError {
    #[error("edge ({u}, {v}) references a node outside 0..{n}")]
    NodeOutOfRange { u: usize, v: usize, n: usize },

    #[error("node {node} is outside 0..{n}")]
    InvalidNode { node: usize, n: usize },

    #[error("edge ({u}, {v}) does not exist")]
    MissingEdge { u: usize, v: usize },

    #[error("permutation is not a bijection on 0..{n}")]
    NotBijection { n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("graph has {n} nodes, above the limit of {limit}")]
    GraphTooLarge { n: usize, limit: usize },

    #[error("loss needs at least one labeled node")]
    NoLabeledNodes,

    #[error("trace was produced by different parameters")]
    StaleTrace,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("score kind {0:?} cannot be used here")]
    WrongScoreKind(crate::centrality::ScoreKind),

    #[error("split would leave the {0} set empty")]
    EmptySplit(&'static str),

    #[error("non-finite value detected: {0}")]
    NonFinite(String),
}

impl ShsError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ShsError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ShsError::InvalidParameter(msg.into())
    }
}
