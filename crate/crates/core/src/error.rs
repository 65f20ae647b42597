use thiserror::Error;

/// Errors raised by tensor, geometry, and evaluation routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("arity mismatch: tensor of rank {rank} evaluated on {args} vectors")]
    ArityMismatch { rank: usize, args: usize },

    #[error("unsupported ambient dimension {0} (only 2 and 3 are supported)")]
    UnsupportedDimension(usize),

    #[error("basis is not orthonormal (deviation {0:e})")]
    NonOrthonormal(f64),

    #[error("degenerate input: affine rank {affine_rank} in R^{dim}")]
    Degenerate { affine_rank: usize, dim: usize },

    #[error("halfspace intersection is empty or lower-dimensional")]
    EmptyIntersection,

    #[error("scale factor must be nonnegative, got {0}")]
    NegativeScale(f64),

    #[error("invalid functional: {0}")]
    InvalidSpec(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("refinement cap of depth {depth} exceeded (last estimates {coarse:e} and {fine:e})")]
    RefinementCap { depth: usize, coarse: f64, fine: f64 },

    #[error("weight support reaches the rim of the cap (max radius {radius:.6} >= {limit:.6})")]
    SupportReachesRim { radius: f64, limit: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
