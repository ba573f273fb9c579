use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("index {index} out of range for truncation dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A physical constraint on the parameters is violated; the message names it.
    #[error("validation failed: {constraint} (got {value})")]
    Validation { constraint: &'static str, value: f64 },

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("quadrature did not converge on [{a}, {b}]: last step-halving change {change:e}")]
    Quadrature { a: f64, b: f64, change: f64 },

    #[error("operator is not Hermitian: max |M - M^dagger| = {deviation:e}")]
    NonHermitian { deviation: f64 },

    #[error("invalid Hamiltonian spec: {0}")]
    InvalidSpec(&'static str),

    #[error("stepper configuration rejected: {0}")]
    StepperConfig(String),

    #[error("stepper failure at t = {t}: norm drift {drift:e}")]
    StepperFailure { t: f64, drift: f64 },

    #[error("fidelity loss at t = {t}: overlap modulus {modulus} with the reference state")]
    Fidelity { t: f64, modulus: f64 },

    #[error("undersampled phase at t = {t}: step {step} rad exceeds pi/2")]
    Sampling { t: f64, step: f64 },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("outside the perturbative regime: chi * delta_t = {0} >= 0.1")]
    OutsideApproximation(f64),

    #[error("kappa grid must be monotone non-decreasing")]
    NonMonotoneGrid,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag, one per variant.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InvalidDimension { .. } => "invalid-dimension",
            Error::IndexOutOfRange { .. } => "index",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::Validation { .. } => "validation",
            Error::NegativeTime(_) => "domain",
            Error::Quadrature { .. } => "numerical-accuracy",
            Error::NonHermitian { .. } => "construction",
            Error::InvalidSpec(_) => "invalid-spec",
            Error::StepperConfig(_) => "stepper-config",
            Error::StepperFailure { .. } => "stepper-failure",
            Error::Fidelity { .. } => "fidelity",
            Error::Sampling { .. } => "sampling",
            Error::Protocol(_) => "protocol",
            Error::OutsideApproximation(_) => "outside-approximation",
            Error::NonMonotoneGrid => "grid",
            Error::Io(_) => "io",
        }
    }
}
