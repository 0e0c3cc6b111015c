use thiserror::Error;

/// Errors produced by the construction, simulation and enumeration routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("arithmetic overflow in exact computation: {0}")]
    Overflow(String),

    #[error("enumeration of {required} injections exceeds the feasibility guard of {limit}")]
    Infeasible { required: u128, limit: u128 },

    #[error("partition is not in EC(k,t): {0}")]
    NotEvenCactus(String),

    #[error("graph has a loop at edge {0}")]
    HasLoop(usize),

    #[error("malformed matrix file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
