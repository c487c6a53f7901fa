use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] wgqed::Error),

    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("bad config {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    /// Some scan cells failed; the grid was still written.
    #[error("{failed} of {total} scan cells failed")]
    CellsFailed {
        failed: usize,
        total: usize,
        code: u8,
    },
}

pub type CliResult<T> = Result<T, CliError>;

/// Exit code for a core error: bad inputs are usage errors, broken physical
/// invariants in results are 4, everything else numerical is 3.
pub fn model_exit_code(e: &wgqed::Error) -> u8 {
    use wgqed::Error::*;
    match e {
        OutOfRange { .. } | Config(_) | DimensionMismatch { .. } | DimensionOverflow { .. } => 2,
        InvariantViolation { .. } | InvalidDensity(_) => 4,
        StepUnderflow { .. }
        | TooManySteps { .. }
        | NonFinite { .. }
        | NotHermitian { .. }
        | NonMonotone(_) => 3,
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::ConfigRead { .. } | Self::ConfigParse { .. } => 2,
            Self::Model(e) => model_exit_code(e),
            Self::Write { .. } => 1,
            Self::CellsFailed { code, .. } => *code,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
