use std::path::PathBuf;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("node id {0} is out of range")]
    InvalidNode(NodeId),

    #[error("pair ({0}, {0}) is not a valid node pair")]
    SelfPair(NodeId),

    #[error("pair at index {index}: {source}")]
    AtPair {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("infeasible sampling request: {0}")]
    Infeasible(String),

    #[error("training data must contain both classes")]
    SingleClass,

    #[error("feature arity mismatch: model expects {expected}, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },

    #[error("unknown feature column `{0}`")]
    UnknownFeature(String),

    #[error("model file version {found} is not supported (expected {expected})")]
    ModelVersion { expected: u32, found: u32 },

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
