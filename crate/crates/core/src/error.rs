use thiserror::Error;

use crate::witness::ChainKind;

/// Error type shared by the whole crate.
///
/// Everything here is an *input* problem (bad dimensions, unsupported
/// values, malformed specs) or a numeric precondition failure. Negative
/// classification results are not errors; they are reported as verdicts.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {n} too small: needs n >= {required}")]
    DimensionTooSmall { n: usize, required: usize },

    #[error("no imaginary pivot: the point is real")]
    NoImaginaryPivot,

    #[error("matrix is not square: {rows}x{cols}")]
    NonSquareMatrix { rows: usize, cols: usize },

    #[error("unknown builtin map '{0}'")]
    UnknownBuiltin(String),

    #[error("unsampled point: the tabulated map lists no such input")]
    UnsampledPoint,

    #[error("zero distance is unsupported")]
    ZeroDistance,

    #[error("underdetermined: real points are fixed by hypothesis")]
    UnderdeterminedRealPoint,

    #[error("propagation not licensed: edge {edge} has |psi| = {psi:.3e}")]
    PropagationNotLicensed { edge: usize, psi: f64 },

    #[error("expected a {expected} chain, got {found}")]
    WrongChainKind {
        expected: ChainKind,
        found: ChainKind,
    },

    #[error("real restriction not orthogonal-affine: residual {residual:.3e}")]
    RealRestrictionNotOrthogonal { residual: f64 },

    #[error("not affine on R^n: image of e_{j} + e_{k} is off by {deviation:.3e}")]
    NotAffineOnReals { j: usize, k: usize, deviation: f64 },

    #[error("dimension 1 input: use the one-dimensional classifier")]
    UseDim1Classifier,

    #[error("forcing solve failed: no candidate matched the input point")]
    CandidateMismatch,

    #[error("could not sample a non-isotropic direction")]
    IsotropicSampling,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
