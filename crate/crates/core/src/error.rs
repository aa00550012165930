use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("order {order} is outside the supported range {min}..={max}")]
    UnsupportedOrder {
        order: usize,
        min: usize,
        max: usize,
    },

    #[error("{what}: argument {value} is outside the function domain")]
    Domain { what: &'static str, value: f64 },

    #[error("series index ({i}, {j}) is outside the truncation ({max_i}, {max_j})")]
    SeriesIndex {
        i: usize,
        j: usize,
        max_i: usize,
        max_j: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("position {z} m is outside the path [0, {path_length}] m")]
    OutsidePath { z: f64, path_length: f64 },

    #[error("turbulence profile table is empty or has fewer than two rows")]
    EmptyProfile,

    #[error("{path}:{line}: {reason}")]
    ProfileParse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("mode index {what} exceeds the supported guard {limit}")]
    IndexGuard { what: String, limit: usize },

    #[error("mode ({r}, {l}) is not in the basis")]
    ModeAbsent { r: usize, l: i32 },

    #[error("dimension {dim} exceeds guard {limit}")]
    DimensionGuard { dim: usize, limit: usize },

    #[error("solver did not converge under step doubling: {coarse:e} vs {fine:e}")]
    NonConvergence { coarse: f64, fine: f64 },

    #[error("mode {mode} is not resolved by a grid of order {order}")]
    UnderResolved { mode: usize, order: usize },

    #[error("density matrix is not valid: {0}")]
    InvalidDensity(String),

    #[error("eigen-decomposition failed")]
    Eigen,

    #[error("{0}")]
    Config(String),

    #[error("`{key}` is out of range: {reason}")]
    Range { key: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
