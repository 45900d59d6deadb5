use thiserror::Error;

use crate::field::Frame;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("frame mismatch: expected {expected:?}, found {found:?}")]
    FrameMismatch { expected: Frame, found: Frame },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("unsupported derivative order {0} (expected 1, 2 or 3)")]
    UnsupportedOrder(usize),

    #[error("Sobolev index {0} out of range (expected 0..=3)")]
    SobolevIndex(usize),

    #[error("boundary trace {value:.3e} exceeds tolerance {tol:.1e}")]
    BoundaryTrace { value: f64, tol: f64 },

    #[error("operator undefined at zero wavenumber")]
    ZeroWavenumber,

    #[error("singular discretization at k = {0}")]
    Singular(f64),

    #[error("time step {dt:.3e} violates the advective limit {limit:.3e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("time step rejected {0} times in a row")]
    StepRejected(usize),

    #[error("non-finite values in the solution at t = {0}")]
    Blowup(f64),

    #[error("sample time {t} is not after previous sample {prev}")]
    NonMonotoneTime { t: f64, prev: f64 },

    #[error("invalid dyadic partition: {0}")]
    Partition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
