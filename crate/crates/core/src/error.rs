use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid projection: {0}")]
    InvalidProjection(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("projection is not injective on the grid: modes {first:?} and {second:?} share a wavevector")]
    NonInjective { first: Vec<i64>, second: Vec<i64> },

    #[error("field or symbol belongs to a different grid")]
    GridMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("field has non-zero mean (|phi(0)| = {0:e})")]
    NonZeroMean(f64),

    #[error("F1 = {0:e} is not positive; C1 is too small for this field")]
    NonPositiveF1(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty peak set")]
    EmptySpectrum,

    #[error("config: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Failures that come from the numerics rather than from the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveF1(_) | Error::NonFinite(_) | Error::NonZeroMean(_)
        )
    }
}
