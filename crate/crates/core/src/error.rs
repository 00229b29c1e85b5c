use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// An iteration ran out of terms before reaching its tolerance.
    #[error("{what} truncated after {iterations} terms (tail estimate {tail:e})")]
    Truncated {
        what: &'static str,
        iterations: usize,
        tail: f64,
    },

    #[error("degenerate solution pair: wronskian {0:e}")]
    DegeneratePair(f64),

    #[error("transmutation spec is not invertible: determinant {0:e}")]
    NotInvertible(f64),

    #[error("ill-posed request: {0}")]
    IllPosed(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical invariant violated: {0}")]
    Invariant(String),

    #[error("invalid value for `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
