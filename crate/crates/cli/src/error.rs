// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{path}: {msg}")]
    Format { path: String, msg: String },
    #[error("input series is empty")]
    EmptySeries,
    #[error(transparent)]
    Npid(#[from] npid::NpidError),
}

impl CliError {
    /// Process exit status. Usage errors exit with 2 from the argument parser.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Write { .. } => 3,
            CliError::Parse { .. } | CliError::Json { .. } | CliError::Format { .. } => 4,
            CliError::EmptySeries | CliError::Npid(npid::NpidError::EmptySeries) => 5,
            CliError::Npid(_) => 1,
        }
    }
}
