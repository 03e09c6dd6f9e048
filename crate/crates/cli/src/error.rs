use std::fmt;

use liemult_core::Error;

/// Process exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_MATH: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// A failure that ends the run with a specific exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            kind: "config",
            message: message.into(),
        }
    }

    pub fn resolution(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            kind: "resolution",
            message: message.into(),
        }
    }

    pub fn math(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_MATH,
            kind: "math",
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Exceptional { .. } => {
                CliError::math(format!("{e}; c is exceptional exactly when ic ∈ (|X|/2)ℤ, that is ic ∈ ½ℤ for normalised X"))
            }
            Error::NotNormalised { .. } | Error::OutOfRange(_) => CliError::math(e.to_string()),
            Error::BandExceeded { .. }
            | Error::GridTooSmall { .. }
            | Error::RangeNotExact { .. }
            | Error::MarginExceeded { .. }
            | Error::RangeTooSmall { .. }
            | Error::Unresolved { .. }
            | Error::LadderTooShort { .. } => CliError::resolution(e.to_string()),
            _ => CliError::config(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
