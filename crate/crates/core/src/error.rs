//! Error type shared by every module, with a coarse classification that
//! front ends map onto exit codes.

use thiserror::Error;

/// Coarse failure class. Front ends map these to distinct exit codes:
/// invalid input, admissibility failure (the data is too coarse or a search
/// was exhausted — refine and retry), or numerical failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Admissibility,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("expected {expected} basis vectors, got {got}")]
    WrongVectorCount { expected: usize, got: usize },

    #[error("rank deficient: {0}")]
    RankDeficient(String),

    #[error("span is not isotropic: residual {residual:.3e} exceeds {tol:.3e}")]
    NotIsotropic { residual: f64, tol: f64 },

    #[error("frame is not orthonormal: residual {residual:.3e} exceeds {tol:.3e}")]
    NotOrthonormal { residual: f64, tol: f64 },

    #[error("matrix is not orthogonal: residual {residual:.3e} exceeds {tol:.3e}")]
    NotOrthogonal { residual: f64, tol: f64 },

    #[error("matrix does not commute with J: residual {residual:.3e} exceeds {tol:.3e}")]
    NotComplexLinear { residual: f64, tol: f64 },

    #[error("matrix is not symmetric: residual {residual:.3e} exceeds {tol:.3e}")]
    NotSymmetric { residual: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eig:.3e}")]
    NotPositiveSemidefinite { min_eig: f64 },

    #[error("subspaces are not transverse: {0}")]
    NotTransverse(String),

    #[error("Lagrangians are not complementary: gap {gap:.3e} is not above the floor {floor:.3e}")]
    NotComplementary { gap: f64, floor: f64 },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("paths do not join: {0}")]
    EndpointMismatch(String),

    #[error("path is not a loop: first and last samples span different subspaces")]
    NotALoop,

    #[error("singular solve: {0}")]
    SingularSolve(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    // ---- admissibility: refine the sampling or relax a margin ----
    #[error(
        "no admissible barrier below {cap:.3} on interval {interval}: refine the sampling there"
    )]
    NoBarrier { interval: usize, cap: f64 },

    #[error("sampling too coarse: {0}")]
    TooCoarse(String),

    #[error("consecutive samples exceed the step cap: {0}")]
    StepTooLarge(String),

    #[error(
        "phase step {step:.3e} on interval {interval} is not below pi/2: refine the sampling"
    )]
    PhaseStepTooLarge { interval: usize, step: f64 },

    #[error(
        "no complement covers even one step from sample {sample} after {tries} candidates: \
         refine the sampling or lower the margin"
    )]
    PartitionFailed { sample: usize, tries: usize },

    #[error(
        "complement search exhausted after {tries} candidates at margin {margin:.3e}: \
         lower the margin"
    )]
    ComplementExhausted { tries: usize, margin: f64 },

    // ---- numerical ----
    #[error(
        "square-root iteration did not converge within {max_iter} steps \
         (residual {residual:.3e})"
    )]
    SqrtDiverged { max_iter: usize, residual: f64 },

    #[error("eigendecomposition failed: {0}")]
    EigenFailed(String),

    #[error("singular value decomposition failed: {0}")]
    SvdFailed(String),

    // ---- io ----
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// The failure class used for exit-code mapping.
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            NoBarrier { .. }
            | TooCoarse(_)
            | StepTooLarge(_)
            | PhaseStepTooLarge { .. }
            | PartitionFailed { .. }
            | ComplementExhausted { .. } => ErrorClass::Admissibility,
            SqrtDiverged { .. } | EigenFailed(_) | SvdFailed(_) => ErrorClass::Numerical,
            _ => ErrorClass::Input,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
