use thiserror::Error;

use crate::linalg::ComplexMatrix;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("eigenvalue iteration did not converge after {iterations} sweeps (n = {})", matrix.n())]
    NoConvergence {
        iterations: usize,
        matrix: Box<ComplexMatrix>,
    },

    #[error("tracking could not resolve x in [{lo:.6e}, {hi:.6e}]: {reason}")]
    Tracking { lo: f64, hi: f64, reason: String },

    #[error("structural violation: {0}")]
    Structural(String),

    /// A failure while evaluating one barycentric sample of a hull.
    #[error("at alpha = {alpha:?}: {source}")]
    AtSample {
        alpha: Vec<f64>,
        #[source]
        source: Box<Error>,
    },

    #[error("graph edge ({a}, {b}): {source}")]
    AtPair {
        a: usize,
        b: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn at_sample(self, alpha: &[f64]) -> Self {
        Error::AtSample {
            alpha: alpha.to_vec(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping location wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtSample { source, .. } | Error::AtPair { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Argument(_) | Error::Parse(_) | Error::Io(_) => 2,
            Error::NoConvergence { .. } | Error::Tracking { .. } => 3,
            Error::Structural(_) => 4,
            Error::AtSample { .. } | Error::AtPair { .. } => unreachable!(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
