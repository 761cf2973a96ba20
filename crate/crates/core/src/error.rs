use thiserror::Error;

/// Errors raised by constructions and checks in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("eigenvalue {value:.3e} is below the clamp threshold {threshold:.3e}")]
    NegativeEigenvalue { value: f64, threshold: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("map is not completely positive: {0}")]
    NotCp(String),

    #[error("operator is not in the span of the frame (residual {residual:.3e})")]
    NotInSpan { residual: f64 },

    #[error("instrument normalization Tr_out[Z_total] = I fails (residual {residual:.3e})")]
    NotNormalized { residual: f64 },

    #[error("frame-orbit normalization sum_w mu_w A_w xi A_w^dag = I fails (residual {residual:.3e})")]
    NormalizationFailed { residual: f64 },

    #[error("frame is not left-tight (residual {residual:.3e})")]
    NotLeftTight { residual: f64 },

    #[error("frame is not tight (residual {residual:.3e})")]
    NotTight { residual: f64 },

    #[error("channel is not covariant (residual {residual:.3e})")]
    NotCovariant { residual: f64 },

    #[error("seed map does not commute with the stabilizer action (residual {residual:.3e})")]
    StabilizerInvarianceFailed { residual: f64 },

    #[error("character-based operations require an ordinary (non-projective) representation")]
    ProjectiveUnsupported,

    #[error("all outcome probabilities vanish for this state")]
    DegenerateState,

    #[error("size {0} exceeds the supported range")]
    SizeOverflow(usize),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
