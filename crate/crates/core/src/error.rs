use thiserror::Error;

use crate::seq::ParseErrors;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("unknown state name `{name}` (valid: {valid})")]
    UnknownState { name: String, valid: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("channel produced an invalid state: {0}")]
    ChannelInvariant(String),

    #[error("FID length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("integration region [{lo}, {hi}] Hz lies outside the spectrum axis [{min}, {max}] Hz")]
    RegionOutsideAxis { lo: f64, hi: f64, min: f64, max: f64 },

    #[error("readout map is singular (smallest singular value {0:e})")]
    SingularReadout(f64),

    #[error("root solver did not converge: {0}")]
    NoConvergence(String),

    #[error(transparent)]
    Parse(#[from] ParseErrors),

    #[error("compile error at {line}:{column}: {message}")]
    Compile {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("channel `{0}` has no text form")]
    Unrepresentable(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
