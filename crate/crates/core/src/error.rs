use std::path::PathBuf;

/// Errors raised by the solver suite. Numeric payloads are reported as `f64`
/// regardless of the scalar type the computation ran in.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("mesh needs at least 2 interior points, got {0}")]
    MeshTooCoarse(usize),

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error(
        "assembled operator is not positive definite: reaction sup-norm {sup_norm} \
         must stay below the first Dirichlet eigenvalue {lambda1}"
    )]
    NotPositiveDefinite { sup_norm: f64, lambda1: f64 },

    #[error("requested {requested} modes but the mesh has only {available} interior points")]
    TooManyModes { requested: usize, available: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("resolvent shift {shift} must exceed -lambda_1 = {neg_lambda1}")]
    ResolventShift { shift: f64, neg_lambda1: f64 },

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("control trajectory has {got} samples but the time grid has {expected} nodes")]
    GridMismatch { expected: usize, got: usize },

    #[error("invalid control mask: {0}")]
    InvalidMask(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("horizon {tau} lies outside (0, tau_hat = {tau_hat}); the minimizer of J would be zero")]
    OutsideReachWindow { tau: f64, tau_hat: f64 },

    #[error("root bracket failure: N*({lo}) = {n_lo}, N*({hi}) = {n_hi} do not straddle M = {target}")]
    BracketFailure {
        lo: f64,
        hi: f64,
        n_lo: f64,
        n_hi: f64,
        target: f64,
    },

    #[error("epsilon {epsilon}: {reason}")]
    InvalidEpsilon { epsilon: f64, reason: String },

    #[error("operators are defined on different meshes ({0} vs {1} interior points)")]
    MeshMismatch(usize, usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
