use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("degenerate field: total power is zero")]
    DegenerateField,

    #[error("degenerate state: both path amplitudes are zero")]
    DegenerateState,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("sampling error in {what}: {detail}")]
    Sampling { what: &'static str, detail: String },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("negative propagation distance {0} m (back-propagation is not supported)")]
    NegativeDistance(f64),

    #[error("plan step {step}: {source}")]
    Chain {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unreliable fringe fit: {0}")]
    UnreliableFit(String),

    #[error("image spots overlap: saddle/smaller-peak ratio {ratio:.3} exceeds 0.1")]
    Separation { ratio: f64 },

    #[error("power accounting error: {0}")]
    Accounting(String),

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("complementarity violation: event {event_id} already consumed by `{owner}`, cannot also feed `{requested}`")]
    ComplementarityViolation {
        event_id: u64,
        owner: String,
        requested: String,
    },

    #[error("ledger error: {0}")]
    Ledger(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn sampling(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Sampling {
            what,
            detail: detail.into(),
        }
    }

    pub(crate) fn validation(key: &str, message: impl Into<String>) -> Self {
        Error::Validation {
            key: key.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad input or configuration rather than by a
    /// numerical result.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Chain { source, .. } => source.is_validation(),
            _ => matches!(
                self,
                Error::Configuration(_)
                    | Error::Geometry(_)
                    | Error::NegativeDistance(_)
                    | Error::Separation { .. }
                    | Error::Parse { .. }
                    | Error::Validation { .. }
                    | Error::UnknownScenario(_)
                    | Error::Io { .. }
            ),
        }
    }
}
