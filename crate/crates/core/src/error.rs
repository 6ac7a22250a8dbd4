use thiserror::Error;

use crate::solver::SimState;

/// Failure classes of the laboratory. The CLI maps these onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    /// A precondition of an operation was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical divergence at t = {t}: {reason}")]
    Divergence { t: f64, reason: String },

    /// The explicit step would exceed the CFL guard; carries the last good state.
    #[error("CFL guard exceeded at t = {}: courant number {courant:.3e} > {limit:.3e}", .state.t)]
    Cfl {
        courant: f64,
        limit: f64,
        state: Box<SimState>,
    },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
