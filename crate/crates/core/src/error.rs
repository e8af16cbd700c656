use std::io;

use thiserror::Error;

/// Errors produced by the simulator building blocks.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Operand shapes are incompatible.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A probability column or pair collapsed to zero; should be unreachable
    /// with clamped branch metrics.
    #[error("numerical degeneracy: {0}")]
    Degeneracy(String),
    /// A configuration file or key could not be interpreted.
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
