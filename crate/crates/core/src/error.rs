use thiserror::Error;

use crate::algebra::GroupId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group mismatch: {0:?} vs {1:?}")]
    GroupMismatch(GroupId, GroupId),

    #[error("no Haar rule available for {0:?}")]
    UnsupportedGroup(GroupId),

    #[error("unknown catalog id `{0}` (expected one of: trivial-s2, hopf, gm)")]
    UnknownId(String),

    #[error("diagram `{0}` has no metric model")]
    UnknownDiagram(String),

    #[error("diagram `{0}` is not cohomogeneity one; basic spectra are unsupported")]
    NotCohomogeneityOne(String),

    #[error("function is not invariant: sampled defect {defect:.3e}")]
    NotInvariant { defect: f64 },

    #[error("transported function is ill-defined: preimages disagree by {defect:.3e}")]
    IllDefined { defect: f64 },

    #[error("grid mismatch: expected {expected} values, got {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("nonpositive orbit weight {value:.3e} at node {index}")]
    NonpositiveWeight { index: usize, value: f64 },

    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("vector vanishes after zero-mean projection")]
    ZeroVector,

    #[error("spectra come from different metrics or sides ({0} vs {1})")]
    FingerprintMismatch(String, String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
