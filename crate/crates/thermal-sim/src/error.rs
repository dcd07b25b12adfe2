use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid variance {0} SNU: a thermal quadrature variance must be >= 1")]
    InvalidVariance(f64),

    #[error("domain error in {context}: {message}")]
    Domain { context: &'static str, message: String },

    #[error("mode label {0:?} appears more than once")]
    LabelCollision(String),

    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeIndexOutOfRange { index: usize, n_modes: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("covariance matrix is not symmetric (max asymmetry {0:.3e} > 1e-10)")]
    NotSymmetric(f64),

    #[error("unphysical state at {stage}: min symplectic eigenvalue {min_nu} < 1 - 1e-9")]
    Unphysical { stage: &'static str, min_nu: f64 },

    #[error("measured quadrature variance {0:.3e} is numerically singular (< 1e-12)")]
    SingularMeasurement(f64),

    #[error("mode subsets overlap: index {0} appears in more than one subset")]
    OverlappingSubsets(usize),

    #[error("empty mode subset")]
    EmptySubset,

    #[error("series length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("mean intensity is zero; g2 is undefined")]
    ZeroMeanIntensity,

    #[error("eigenvalue solver failed: {0}")]
    EigenFailure(String),

    #[error("matrix factorization failed: {0}")]
    FactorizationFailure(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems,
    /// 3 for numerical/physicality failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}
