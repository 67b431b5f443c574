use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input shape: {0}")]
    InputShape(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("node {node} in tree {tree}: {reason}")]
    NodeValidation {
        tree: usize,
        node: i64,
        reason: String,
    },

    #[error("unknown ensemble kind `{0}`")]
    UnknownKind(String),

    #[error("unknown output space `{0}`")]
    UnknownOutputSpace(String),

    #[error("dataset: {0}")]
    Dataset(String),

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("training: {0}")]
    Training(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("split: {0}")]
    Split(String),

    #[error("undefined for empty input: {0}")]
    UndefinedInput(&'static str),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("oracle too large: {features} active features exceeds the limit of {limit}")]
    OracleTooLarge { features: usize, limit: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("study: {0}")]
    Study(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed document: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by malformed inputs (datasets, models, shapes),
    /// as opposed to failures inside a training run or study.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Training(_) | Error::Study(_) | Error::Io { .. }
        )
    }
}
