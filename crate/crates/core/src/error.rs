use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}, column {column}: cannot parse {token:?} as a number")]
    ParseValue {
        line: usize,
        column: usize,
        token: String,
    },

    #[error("line {line}: a label must be followed by at least one value")]
    LabelOnly { line: usize },

    #[error("line {line}, column {column}: value {token:?} is not finite")]
    NonFinite {
        line: usize,
        column: usize,
        token: String,
    },

    #[error("dataset contains no series")]
    EmptyDataset,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("series of length {len} is shorter than window {window}")]
    SeriesTooShort { len: usize, window: usize },

    #[error("lookup table has {rows} rows but the word length is {word_len}")]
    TableMismatch { rows: usize, word_len: usize },

    #[error("SFA configuration (window {window}, word length {word_len}) has no fitted lookup table")]
    UnfittedConfig { window: usize, word_len: usize },

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("training data needs at least two classes, found {0}")]
    SingleClass(usize),

    #[error("unsupported model mode: {0}")]
    UnsupportedMode(&'static str),

    #[error("unsupported model file version {found} (expected {expected})")]
    Version { found: String, expected: u32 },

    #[error("model file is truncated: {0}")]
    Truncated(String),

    #[error("checksum mismatch in model section '{0}'")]
    Checksum(String),

    #[error("malformed model file, section '{section}': {message}")]
    ModelFormat { section: String, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::InvalidConfig(message.into())
    }
}
