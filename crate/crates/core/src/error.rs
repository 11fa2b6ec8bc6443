use thiserror::Error;

/// Errors produced by the bound computation and verification pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("amplitude {0} exceeds the 11-bit size range")]
    Range(i32),

    #[error("scale factor {0} is outside the supported range [1/64, 1]")]
    UnsupportedScale(String),

    #[error("unsupported quantization table: {0}")]
    UnsupportedTable(String),

    #[error("configuration violates the AC ball constraint: {0}")]
    Constraint(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("soundness violation: {bits} bits exceeds limit {limit}")]
    SoundnessViolation { bits: u32, limit: u32, block: Box<[[i16; 8]; 8]> },

    #[error("toy instance with {0} positions is too large to enumerate")]
    OracleTooLarge(usize),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
