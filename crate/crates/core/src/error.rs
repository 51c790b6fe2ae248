use thiserror::Error;

/// Errors surfaced by the library.
///
/// `NotOrthogonal`, `NotCritical`, `EigenvalueCluster` and `Singular` signal
/// numerically invalid inputs rather than programming errors; the CLI maps
/// them to a distinct exit code.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("orthogonality residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotOrthogonal { residual: f64, tol: f64 },

    #[error("matrix is singular or nearly singular")]
    Singular,

    #[error("point is not critical: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotCritical { residual: f64, tol: f64 },

    #[error("eigenvalue {value} of diagonal block {block} is not near any prescribed eigenvalue")]
    EigenvalueCluster { value: f64, block: usize },

    #[error("vector is not tangent at the given point (residual {0:.3e})")]
    NotTangent(f64),

    #[error("numerical validation failed: {0}")]
    Validation(String),
}

impl Error {
    /// True for errors caused by numerically invalid data (as opposed to
    /// malformed arguments).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotOrthogonal { .. }
                | Error::Singular
                | Error::NotCritical { .. }
                | Error::EigenvalueCluster { .. }
                | Error::NotTangent(_)
                | Error::Validation(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
