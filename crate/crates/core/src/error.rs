use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("whitelist is empty")]
    EmptyWhitelist,

    #[error("duplicate entry at line {line}")]
    DuplicateWhitelistEntry { line: usize },

    #[error("malformed whitelist entry at line {line}: {reason}")]
    MalformedWhitelistEntry { line: usize, reason: String },

    #[error("manifest line {line}: {reason}")]
    Manifest { line: usize, reason: String },

    #[error("line {line}: {message}")]
    Lex { line: u32, message: String },

    #[error("line {line}: {message}")]
    Parse { line: u32, message: String },

    #[error("snapshots share the label `{0}`")]
    SameSnapshot(String),

    #[error("census input mixes version pairs ({0} and {1})")]
    MixedVersionPairs(String, String),

    #[error("classify_change requires differing bodies")]
    IdenticalBodies,

    #[error("at least two snapshots are required, got {0}")]
    TooFewSnapshots(usize),

    #[error("undefined correlation")]
    UndefinedCorrelation,

    #[error("invalid metric vectors: {0}")]
    InvalidSeries(String),

    #[error("metrics csv row {row}: {reason}")]
    MetricsCsv { row: usize, reason: String },

    #[error("version codes table line {line}: {reason}")]
    CodesTable { line: usize, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
