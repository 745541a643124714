use thiserror::Error;

use crate::quadruple::Quadruple;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quadruple ({quadruple}) does not satisfy the Descartes equation (form value {form})")]
    NotDescartes { quadruple: Quadruple, form: i64 },

    #[error("quadruple ({quadruple}) is imprimitive (common factor {gcd})")]
    Imprimitive { quadruple: Quadruple, gcd: i64 },

    #[error("quadruple ({quadruple}) must have exactly two even and two odd entries")]
    WrongParity { quadruple: Quadruple },

    #[error("quadruple ({quadruple}) does not describe a bounded packing")]
    UnboundedPacking { quadruple: Quadruple },

    #[error("quadruple ({quadruple}) is not a reduced root: {reason}")]
    NotRoot { quadruple: Quadruple, reason: &'static str },

    #[error("generator index {0} out of range 1..=4")]
    GeneratorIndex(usize),

    #[error("arithmetic overflow")]
    ArithmeticOverflow,

    #[error("capacity exceeded: need {required} {unit}, budget {budget} {unit}; {hint}")]
    Capacity {
        required: u64,
        budget: u64,
        unit: &'static str,
        hint: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("file format error: {0}")]
    FileFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json encoding: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub(crate) fn invalid_argument(msg: impl Into<String>) -> Error {
    Error::invalid(msg)
}

pub type Result<T> = std::result::Result<T, Error>;
