use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{context}: {source}")]
    Csv {
        context: String,
        #[source]
        source: csv::Error,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("prediction and gold key sets differ ({only_predicted} only predicted, {only_gold} only gold)")]
    MismatchedKeys {
        only_predicted: usize,
        only_gold: usize,
    },
    #[error("vocabulary is empty after dropping zero-length documents")]
    EmptyVocabulary,
    #[error("no bigram positions in lexicon for {0}")]
    NoBigrams(String),
    #[error("model invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
