use std::io;

use thiserror::Error;

/// Failures while reading or writing graph and matrix files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: vertex id {id} is not below {limit}")]
    Range { line: usize, id: u64, limit: u64 },
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("file truncated while reading {what}")]
    Truncated { what: &'static str },
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error(transparent)]
    Graph(#[from] pcpm_core::Error),
}

pub type Result<T, E = FormatError> = std::result::Result<T, E>;
