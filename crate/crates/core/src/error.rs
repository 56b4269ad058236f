use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input is not valid UTF-8 (byte offset {offset})")]
    InputEncoding { offset: usize },

    #[error("pattern `{pattern}` does not match word `{word}`")]
    KeyMismatch { word: String, pattern: String },

    #[error("{source_name}:{line}: {message}")]
    Format {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("corpus contains no words")]
    EmptyCorpus,

    #[error("insufficient training data: {0}")]
    InsufficientTrainingData(String),

    #[error("cross-validation set is empty")]
    InsufficientCvData,

    #[error("ambiguity class `{name}`: {message}")]
    AmbiguityClass { name: String, message: String },

    #[error("corpus too small for {folds} folds ({units} units)")]
    TooFewFolds { folds: usize, units: usize },

    #[error("test set is empty")]
    EmptyTestSet,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn format(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }
}
