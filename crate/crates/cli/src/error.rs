//! Error classification for exit codes: usage problems exit 1, file and
//! format problems exit 2, violated operation contracts exit 3.

use std::fmt;

use efdm::matching::MatchError;
use efdm::stats::StatsError;
use efdm::tensorops::{NpyError, TensorError};

#[derive(Debug)]
pub enum CliError {
    /// The invocation itself is malformed.
    Usage(String),
    /// A file could not be read, decoded, or written.
    Io(String),
    /// Inputs were loaded fine but violate an operation's contract.
    Contract(String),
    /// The consumer closed stdout (e.g. `| head`); exit quietly like any
    /// other well-behaved pipeline stage.
    Pipe,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Pipe => 0,
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Contract(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Io(msg) | CliError::Contract(msg) => {
                f.write_str(msg)
            }
            CliError::Pipe => f.write_str("broken pipe"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            CliError::Pipe
        } else {
            CliError::Io(e.to_string())
        }
    }
}

impl From<NpyError> for CliError {
    fn from(e: NpyError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<image::ImageError> for CliError {
    fn from(e: image::ImageError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<MatchError> for CliError {
    fn from(e: MatchError) -> Self {
        CliError::Contract(e.to_string())
    }
}

impl From<TensorError> for CliError {
    fn from(e: TensorError) -> Self {
        CliError::Contract(e.to_string())
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Contract(e.to_string())
    }
}
