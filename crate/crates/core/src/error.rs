use std::path::PathBuf;

use thiserror::Error;

use crate::normalize::Step;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("empty vocabulary")]
    EmptyVocabulary,

    #[error("normalization step `{0}` already applied")]
    StepReapplied(Step),

    #[error("invalid normalization plan: {0}")]
    InvalidPlan(String),

    #[error("vocabulary mismatch")]
    VocabularyMismatch,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown lexicon `{0}`")]
    UnknownLexicon(String),

    #[error("unknown group `{0}`")]
    UnknownGroup(String),

    #[error("insufficient documents for {trait_name}={pole}: need {needed}, found {found} (short by {})", needed - found)]
    InsufficientDocuments {
        trait_name: String,
        pole: String,
        needed: usize,
        found: usize,
    },

    #[error("rank {k} too large: must be at most {max}")]
    RankTooLarge { k: usize, max: usize },

    #[error("matrix has numerical rank below {k}: singular value {index} is {value:e}")]
    RankDeficient { k: usize, index: usize, value: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("no signal: document has no tokens in either model vocabulary")]
    NoSignal,

    #[error("model format error: {0}")]
    Model(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad inputs or configuration, as opposed to
    /// numerical failures inside a computation.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::RankDeficient { .. } | Error::NonFinite(_) | Error::Domain(_)
        )
    }
}
