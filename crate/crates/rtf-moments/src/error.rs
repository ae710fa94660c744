use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("invalid ideal: {0}")]
    InvalidIdeal(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole at {0}")]
    Pole(String),
    #[error("enumeration cap of {cap} elements exceeded")]
    CapExceeded { cap: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("insufficient eigenvalue coverage: need n up to {need}, have {have}")]
    Coverage { need: u64, have: u64 },
    #[error("malformed eigenvalue data at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("condition guard: {0}")]
    Conditioning(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
