use std::path::PathBuf;

/// Errors raised by the solver library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-physical state: {0}")]
    NonPhysical(String),

    #[error("singular pivot block at index {index} (reciprocal condition {rcond:.3e})")]
    SingularPivot { index: usize, rcond: f64 },

    #[error("singular Schur complement at separator {separator}")]
    SingularSchur { separator: usize },

    #[error("singular dense matrix at column {column}")]
    SingularMatrix { column: usize },

    #[error("non-finite value in {field} at step {step}, iteration {iteration}")]
    NonFinite {
        field: &'static str,
        step: usize,
        iteration: usize,
    },

    #[error("Picard iteration diverging at step {step}: increment grew for three consecutive iterations")]
    Divergence { step: usize },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config: {0}")]
    ConfigValue(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}, line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the numerical method rather than the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonPhysical(_)
                | Error::SingularPivot { .. }
                | Error::SingularSchur { .. }
                | Error::SingularMatrix { .. }
                | Error::NonFinite { .. }
                | Error::Divergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
