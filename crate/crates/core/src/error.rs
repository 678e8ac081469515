use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller supplied an argument outside the operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("channel is not trace preserving (completeness deviation {0:.3e})")]
    NotTracePreserving(f64),

    /// The amplitude-damping decay rate diverges where c1(t) vanishes.
    #[error("decay rate is singular at t = {t} (|c1| = {c1:.3e})")]
    Singularity { t: f64, c1: f64 },

    /// The requested dynamical map is not completely positive.
    #[error("model is not completely positive at t = {t}: {detail}")]
    Model { t: f64, detail: String },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("angle solver found no solution (best residual {best_residual:.3e})")]
    Solver { best_residual: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
