use nalgebra::Complex;
use thiserror::Error;

pub type Result<T, E = KreinError> = std::result::Result<T, E>;

/// Errors raised by the numerical and operator-theoretic layers.
///
/// Variants fall into three families that the command-line front end maps onto
/// distinct exit codes: malformed input, violated preconditions, and numerical
/// refusals (a contour or selector that cannot separate the spectrum).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum KreinError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, found {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("gram matrix is not Hermitian (residual {residual:.3e})")]
    GramNotHermitian { residual: f64 },

    #[error("gram matrix is singular (smallest singular value {sigma_min:.3e})")]
    GramSingular { sigma_min: f64 },

    #[error("basis columns are not orthonormal (residual {residual:.3e})")]
    NotOrthonormal { residual: f64 },

    #[error("operator is not J-normal (residual {residual:.3e} > tolerance {tolerance:.3e})")]
    NotNormal { residual: f64, tolerance: f64 },

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("matrix is not idempotent (residual {residual:.3e})")]
    NotIdempotent { residual: f64 },

    #[error("subspace is not uniformly positive (margin {margin:.3e})")]
    NotUniformlyPositive { margin: f64 },

    #[error("projections do not commute (commutator norm {norm:.3e})")]
    NonCommutingProjections { norm: f64 },

    #[error("precondition violated: {reason}")]
    Precondition {
        reason: String,
        offending: Vec<Complex<f64>>,
    },

    #[error("contour passes within {gap:.3e} of the spectrum at {offending:?}")]
    BoundaryThroughSpectrum {
        gap: f64,
        offending: Vec<Complex<f64>>,
    },

    #[error("selector splits an eigenvalue cluster near {0}")]
    SelectorAmbiguity(Complex<f64>),

    #[error("spectra overlap: {s} and {t} are {gap:.3e} apart")]
    SpectralOverlap {
        s: Complex<f64>,
        t: Complex<f64>,
        gap: f64,
    },

    #[error("{0} is not an eigenvalue of the operator")]
    NotAnEigenvalue(Complex<f64>),

    #[error("eigenvalue collision between generator blocks at {0}")]
    EigenvalueCollision(Complex<f64>),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("matrix decomposition did not converge")]
    NoConvergence,

    #[error("singular linear system")]
    Singular,
}

impl KreinError {
    pub fn precondition(reason: impl Into<String>, offending: Vec<Complex<f64>>) -> Self {
        KreinError::Precondition {
            reason: reason.into(),
            offending,
        }
    }

    /// True for refusals caused by a contour or selector touching the spectrum.
    pub fn is_numerical_refusal(&self) -> bool {
        matches!(
            self,
            KreinError::BoundaryThroughSpectrum { .. }
                | KreinError::SelectorAmbiguity(_)
                | KreinError::SpectralOverlap { .. }
                | KreinError::NoConvergence
        )
    }

    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            KreinError::Precondition { .. }
                | KreinError::NotNormal { .. }
                | KreinError::NotUniformlyPositive { .. }
                | KreinError::NonCommutingProjections { .. }
                | KreinError::NotIdempotent { .. }
                | KreinError::NotAnEigenvalue(_)
        )
    }
}
