use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("series orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("{requested} coefficients supplied for a series of order {order}")]
    TooManyCoefficients { requested: usize, order: usize },

    #[error("negative power of a series whose constant term is not 1")]
    NegativePowerOfDeltaSeries,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series is not invertible: {0}")]
    NotInvertible(String),

    #[error("order {requested} exceeds available order {available}")]
    OrderExceeded { requested: usize, available: usize },

    #[error("index out of range: {0}")]
    Index(String),

    #[error("enumeration of {0}-sets is capped at 12")]
    TooLarge(usize),

    #[error("zeroth moment must be 1, got {0}")]
    BadZerothMoment(String),

    #[error("expected {expected} moments, got {got}")]
    BadMomentCount { expected: usize, got: usize },

    #[error("unknown umbra {0:?}")]
    UnknownAtom(String),

    #[error("indeterminate {0:?} is not declared")]
    UndeclaredIndeterminate(String),

    #[error("name {0:?} is already in use")]
    DuplicateName(String),

    #[error("moment {0} is zero; negative point power undefined")]
    ZeroMomentReciprocal(usize),

    #[error("linear moment must be a nonzero constant, got {0}")]
    NonUnitLinearMoment(String),

    #[error("invalid scale for this constructor: {0}")]
    InvalidScale(String),

    #[error("atom {name:?} is incoherent at order {order}: moment {moment} vs series {series}")]
    Incoherent {
        name: String,
        order: usize,
        moment: String,
        series: String,
    },

    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

impl Error {
    /// Short machine-readable tag used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OrderMismatch { .. } => "OrderMismatch",
            Error::TooManyCoefficients { .. } => "TooManyCoefficients",
            Error::NegativePowerOfDeltaSeries => "NegativePowerOfDeltaSeries",
            Error::Domain(_) => "DomainError",
            Error::NotInvertible(_) => "NotInvertible",
            Error::OrderExceeded { .. } => "OrderExceeded",
            Error::Index(_) => "IndexError",
            Error::TooLarge(_) => "TooLarge",
            Error::BadZerothMoment(_) => "BadZerothMoment",
            Error::BadMomentCount { .. } => "BadMomentCount",
            Error::UnknownAtom(_) => "UnknownAtom",
            Error::UndeclaredIndeterminate(_) => "UndeclaredIndeterminate",
            Error::DuplicateName(_) => "DuplicateName",
            Error::ZeroMomentReciprocal(_) => "ZeroMomentReciprocal",
            Error::NonUnitLinearMoment(_) => "NonUnitLinearMoment",
            Error::InvalidScale(_) => "InvalidScale",
            Error::Incoherent { .. } => "Incoherent",
            Error::UnknownIdentity(_) => "UnknownIdentity",
            Error::Parse { .. } => "SyntaxError",
        }
    }
}
