use thiserror::Error;

/// Errors raised by the simulator and its solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("infeasible dimensions: {required} receive antennas requested but only {available} transmit antennas")]
    InfeasibleDimension { required: usize, available: usize },

    #[error("pilot overhead exceeds the coherence block (xi = {xi})")]
    OverheadExceedsCoherence { xi: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("matrix is not Hermitian (relative deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Gram matrix is numerically singular")]
    NumericalSingularity,

    #[error("block diagonalization infeasible for user {user} of group {group}: no interference-free stream left")]
    BdInfeasible { group: usize, user: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("power grids differ between the compared reports")]
    GridMismatch,

    #[error("invalid cell geometry: {0}")]
    InvalidGeometry(String),
}

pub type Result<T> = std::result::Result<T, Error>;
