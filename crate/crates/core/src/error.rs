use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("columns are linearly dependent")]
    DependentColumns,

    #[error("element `{0}` is not in the possibility space")]
    UnknownElement(String),

    #[error("possibility space needs at least {min} elements, got {found}")]
    SpaceTooSmall { min: usize, found: usize },

    #[error("duplicate element label `{0}`")]
    DuplicateElement(String),

    #[error("duplicate gamble name `{0}`")]
    DuplicateName(String),

    #[error("gambles `{0}` and `{1}` have identical payoffs")]
    DuplicateGamble(String, String),

    #[error("gamble `{0}` is not normalized (min 0, max 1)")]
    NotNormalized(String),

    #[error("gamble `{0}` is constant")]
    ConstantGamble(String),

    #[error("singleton indicator for `{0}` is missing from the gamble set")]
    MissingIndicator(String),

    #[error("unknown gamble `{0}`")]
    UnknownGamble(String),

    #[error("no value given for gamble `{0}`")]
    MissingValue(String),

    #[error("lower prevision has {found} values but the gamble set has {expected} gambles")]
    IndexMismatch { expected: usize, found: usize },

    #[error("polyhedron is empty")]
    Infeasible,

    #[error("polyhedron is unbounded")]
    Unbounded,

    #[error("lower prevision incurs sure loss (empty credal set)")]
    SureLoss,

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(path: &str, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.to_string(), line, msg: msg.into() }
    }

    /// Usage-level failures (bad files, bad parameters) as opposed to
    /// outcomes of the computation itself.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Io { .. }
                | Error::InvalidFamily(_)
                | Error::UnknownGamble(_)
                | Error::MissingValue(_)
                | Error::UnknownElement(_)
                | Error::DuplicateName(_)
                | Error::DuplicateElement(_)
                | Error::DuplicateGamble(..)
                | Error::ConstantGamble(_)
                | Error::NotNormalized(_)
                | Error::MissingIndicator(_)
                | Error::IndexMismatch { .. }
                | Error::DimensionMismatch { .. }
        )
    }
}
