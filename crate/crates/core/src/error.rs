use thiserror::Error;

/// Errors raised by the numeric kernels and the geometric routines built on them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("jets are expanded at different base points")]
    BaseMismatch,

    #[error("sign of {what} could not be certified at the working precision")]
    UndeterminedSign { what: String },

    #[error("{what} must be positive, got a value certified {found}")]
    NotPositive { what: String, found: &'static str },

    #[error("division by {what}, which is zero")]
    DivisionByZero { what: String },

    #[error("order shortfall in {what}: need {needed}, have {available}")]
    OrderShortfall {
        what: String,
        needed: usize,
        available: usize,
    },

    #[error("point {point} is outside the admissible domain of {family}: {reason}")]
    Inadmissible {
        family: String,
        point: String,
        reason: String,
    },

    #[error("{op} is not representable in the {backend} backend")]
    NotRepresentable { op: String, backend: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("independent computations of {what} disagree")]
    RouteMismatch { what: String },

    #[error("sign of {what} still undetermined at the precision cap of {bits} bits")]
    PrecisionExhausted { what: String, bits: u32 },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True when retrying at a higher working precision may succeed.
    pub fn is_precision_related(&self) -> bool {
        matches!(
            self,
            Error::UndeterminedSign { .. } | Error::PrecisionExhausted { .. }
        )
    }

    pub(crate) fn undetermined(what: impl Into<String>) -> Self {
        Error::UndeterminedSign { what: what.into() }
    }

    pub(crate) fn shortfall(what: impl Into<String>, needed: usize, available: usize) -> Self {
        Error::OrderShortfall {
            what: what.into(),
            needed,
            available,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
