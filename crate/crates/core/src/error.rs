use thiserror::Error;

/// Errors raised by the simulator and its verification harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),

    #[error("state has zero norm")]
    ZeroState,

    #[error("packet width {width} is under-resolved: need at least {min} (3 x largest spacing)")]
    UnderResolved { width: f64, min: f64 },

    #[error("packet does not fit inside the box: {0}")]
    OutsideBox(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("c' is undefined at c = 0")]
    ZeroArgument,

    #[error("gauge transform is not invertible on L2: {0}")]
    NonInvertible(String),

    #[error("parameter set is not closed under the gauge map: {0}")]
    NotClosed(String),

    #[error("states are not orthonormal: {0}")]
    NotOrthonormal(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("time step {dt} exceeds stability bound {limit}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("blow-up at t = {t}: max|psi| grew by a factor {growth:.3e} in one step")]
    BlowUp { t: f64, growth: f64 },

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
