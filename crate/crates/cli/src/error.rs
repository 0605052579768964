use std::fmt;
use std::path::Path;

use amos_core::error::{EigenError, GenerateError, ParseError};
use amos_core::Error;

/// A failure with its process exit code: 1 for bad usage, 2 for bad data,
/// 3 when the eigensolver does not converge.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    NonConvergence(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Data(_) => 2,
            Self::NonConvergence(_) => 3,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::Data(format!("{}: {e}", path.display()))
    }

    pub fn parse(path: &Path, e: ParseError) -> Self {
        Self::Data(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Data(m) | Self::NonConvergence(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Eigen(EigenError::NotConverged { .. }) => Self::NonConvergence(e.to_string()),
            Error::InvalidArgument(m) => Self::Usage(m),
            other => Self::Data(other.to_string()),
        }
    }
}

impl From<EigenError> for CliError {
    fn from(e: EigenError) -> Self {
        Error::from(e).into()
    }
}

impl From<GenerateError> for CliError {
    fn from(e: GenerateError) -> Self {
        Self::Data(e.to_string())
    }
}
