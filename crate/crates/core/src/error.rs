//! Error type shared by all kinlab modules.

use thiserror::Error;

/// Errors produced by grid construction, operator evaluation and the
/// verification labs.
#[derive(Error, Debug)]
pub enum KinlabError {
    /// Two fields were combined but live on different velocity grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A parameter fell outside its admissible domain.
    #[error("parameter domain violation: {0}")]
    ParameterDomain(String),

    /// The phi-weighted weight requires alpha > 3/2.
    #[error("invalid weight: alpha = {alpha} but alpha > 3/2 is required")]
    InvalidWeight { alpha: f64 },

    /// Kinetic factor evaluated at |z| = 0 with a negative exponent.
    #[error("singular kinetic factor at z = 0 with gamma = {gamma} < 0")]
    SingularKineticPoint { gamma: f64 },

    /// Time-modulated conjugation weight stopped decaying.
    #[error("weight blowup: rho - kappa*t = {value} must stay positive")]
    WeightBlowup { value: f64 },

    /// A time integrator left its stability region.
    #[error("instability: {0}")]
    Instability(String),

    /// The solver produced a non-finite value.
    #[error("numerical blowup: {0}")]
    Blowup(String),

    /// A moment basis could not be built on this grid.
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    /// Grönwall hypothesis failure (divergent integral estimate).
    #[error("divergent integral estimate: {0}")]
    DivergentIntegral(String),

    /// Input samples violated a precondition (sign, ordering, finiteness).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Snapshot or report I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed snapshot file.
    #[error("snapshot format error: {0}")]
    SnapshotFormat(String),
}

pub type Result<T> = std::result::Result<T, KinlabError>;
