use thiserror::Error;

use crate::ring::PairGen;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ring context mismatch")]
    ContextMismatch,

    #[error("invalid generator {0}")]
    InvalidGenerator(String),

    #[error("unassigned generator {0}")]
    UnassignedGenerator(PairGen),

    #[error("zeta not evaluable on this backend ({0})")]
    ZetaNotEvaluable(PairGen),

    #[error("degenerate point: {0}")]
    DegeneratePoint(String),

    #[error("retry budget exhausted after {0} attempts")]
    RetriesExhausted(usize),

    #[error("invalid rational literal {0:?}")]
    BadRational(String),

    #[error("insufficient truncation order: {0}")]
    InsufficientOrder(String),

    #[error("gamma table too short: need gamma_{need}, have up to gamma_{have}")]
    GammaTableTooShort { need: usize, have: usize },

    #[error("index set must contain 1: {0}")]
    MissingDistinguished(String),

    #[error("index set must not contain 1: {0}")]
    UnexpectedDistinguished(String),

    #[error("index set too small: {0}")]
    SetTooSmall(String),

    #[error("m must be nonzero")]
    ZeroMass,

    #[error("k = {k} is below 2i = {}", 2 * i)]
    ConstantOutOfRange { i: usize, k: usize },

    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("malformed operator json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
