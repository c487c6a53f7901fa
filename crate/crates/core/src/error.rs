use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tensor product dimension {dim} exceeds the supported maximum of 16")]
    DimensionOverflow { dim: usize },

    #[error("expected a {expected}-dimensional operand, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("not a valid density matrix: {0}")]
    InvalidDensity(String),

    #[error("{name} = {value} is outside {allowed}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        allowed: &'static str,
    },

    #[error("integration step size underflow at t = {t} (h = {h:e}); last good time {t}")]
    StepUnderflow { t: f64, h: f64 },

    #[error("integration exceeded {steps} steps before reaching t = {t_end} (last good time {t})")]
    TooManySteps { steps: usize, t: f64, t_end: f64 },

    #[error("non-finite value produced by the integrator at t = {t}")]
    NonFinite { t: f64 },

    #[error("invariant violated at t = {t}: {what}")]
    InvariantViolation { t: f64, what: String },

    #[error("ESD predicate is not monotone on the bracket: {0}")]
    NonMonotone(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
