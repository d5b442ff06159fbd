use thiserror::Error;

use crate::invariants::ParamVerdict;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid form matrix: {0}")]
    InvalidForm(String),
    #[error("vector is not a point of the space: {0}")]
    NotAPoint(String),
    #[error("objects belong to different spaces")]
    MismatchedSpaces,
    #[error("objects belong to different kernel contexts")]
    MismatchedContexts,
    #[error("matrix does not preserve the form (residual {0:e})")]
    NotAnIsometry(f64),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("cartan argument {0} left [-pi/2, pi/2]")]
    CartanOutOfRange(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported dimension {0} (at most 3)")]
    UnsupportedDimension(usize),
    #[error("element does not fix the first boundary point")]
    NotParabolic,
    #[error("reconstruction impossible: signature ({positive}, {zero}, {negative})")]
    Reconstruction {
        positive: usize,
        zero: usize,
        negative: usize,
    },
    #[error("probe set needs {needed} symbols, cap is {cap}")]
    ProbeOverflow { needed: usize, cap: usize },
    #[error("degenerate probe: {0}")]
    DegenerateProbe(String),
    #[error("(t = {t}, r = {r}) is not constructible: {verdict}")]
    NotConstructible { t: f64, r: f64, verdict: ParamVerdict },
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
