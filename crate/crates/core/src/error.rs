use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("unsupported refinement depth {0}")]
    DepthUnsupported(u8),
    #[error("window underflow: {0}")]
    WindowUnderflow(String),
    #[error("cube does not align with the grid: {0}")]
    Misaligned(String),
    #[error("weight is not integrable: {0}")]
    NonIntegrableWeight(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown probe `{0}`")]
    UnknownProbe(String),
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
