use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{op}: dimension mismatch ({}×{} vs {}×{})", left.0, left.1, right.0, right.1)]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix shape {rows}×{cols} does not match {len} entries")]
    BadShape { rows: usize, cols: usize, len: usize },
    #[error("matrix dimensions must be positive, got {rows}×{cols}")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("{what} did not converge after {iterations} iterations (best estimate {estimate})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        estimate: f64,
    },
    #[error("rank parameter k = {k} out of range (numerical rank {rank})")]
    RankOutOfRange { k: usize, rank: usize },
    #[error("matrix is identically zero")]
    ZeroMatrix,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
