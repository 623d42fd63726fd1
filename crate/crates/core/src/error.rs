use thiserror::Error;

/// Errors raised by geometry, map and I/O operations.
///
/// Stage failures of the ball-extension pipeline have their own type,
/// [`crate::extension::ExtensionError`], because callers branch on the stage.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("refinement emptied the cloud; slack {slack:e} is too small for resolution {eta:e}")]
    DegenerateDiscretization { slack: f64, eta: f64 },

    #[error("refinement did not reach diameter {tol:e} within {iterations} iterations (last diameter {diameter:e})")]
    NonConvergence {
        iterations: usize,
        diameter: f64,
        tol: f64,
    },

    #[error("point {point:?} lies outside the map domain")]
    OutOfDomain { point: Vec<f64> },

    #[error("matrix is singular")]
    Singular,

    #[error("source points do not affinely span the space (rank {rank} < {dim})")]
    RankDeficient { rank: usize, dim: usize },

    #[error("{0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
