// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

pub type Result<T, E = NpidError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NpidError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("empty series")]
    EmptySeries,
    #[error("unknown model id `{0}`")]
    UnknownModel(String),
}

impl NpidError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }
}
