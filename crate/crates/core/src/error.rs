// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = QuenchError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum QuenchError {
    /// Invalid user-facing configuration (grid size, protocol, CLI flags).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An argument violated the precondition of a numerical routine.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A physical state left its admissible region by more than the guard tolerance.
    #[error("positivity violation at k = {k:.6}, t = {t:.6}: {detail}")]
    Positivity { k: f64, t: f64, detail: String },

    /// Failure attached to one momentum mode of a multi-mode evolution.
    #[error("mode k = {k:.6}: {source}")]
    Mode {
        k: f64,
        #[source]
        source: Box<QuenchError>,
    },

    /// A root-finding or extremum search could not bracket its target.
    #[error("search failed: {0}")]
    Search(String),

    /// A fit had no usable data in its window.
    #[error("fit failed: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl QuenchError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Self::InvalidInput(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::InvalidInput(_) => 2,
            Self::Positivity { .. } => 3,
            Self::Mode { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
