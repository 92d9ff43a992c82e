use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("sampling stalled after {rejections} consecutive rejections with {accepted} of {target} positions placed; cloud too dense for the blockade radius")]
    SamplingStalled {
        accepted: usize,
        target: usize,
        rejections: u64,
    },

    #[error("calibration target {target} um cannot be bracketed: {reason}")]
    NonBracketing { target: f64, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Krylov propagation failed to converge (dimension {krylov_dim}, step {step:.3e} us, residual estimate {residual:.3e})")]
    KrylovNonConvergence {
        krylov_dim: usize,
        step: f64,
        residual: f64,
    },

    #[error("unsupported schedule: {0}")]
    UnsupportedSchedule(String),

    #[error("event {index}: {source}")]
    Event {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("center {center}: {source}")]
    Center {
        center: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("realization {realization}: {source}")]
    Realization {
        realization: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_event(self, index: usize) -> Self {
        Error::Event {
            index,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_center(self, center: usize) -> Self {
        Error::Center {
            center,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_realization(self, realization: usize) -> Self {
        Error::Realization {
            realization,
            source: Box::new(self),
        }
    }

    /// True for errors caused by user input rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::Config { .. } | Error::InvalidParameter { .. } => true,
            Error::Event { source, .. } | Error::Center { source, .. } | Error::Realization { source, .. } => {
                source.is_config_error()
            }
            _ => false,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
