use thiserror::Error;

use crate::analytic::SpinorState;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{field}` is not finite ({value})")]
    NonFinite { field: &'static str, value: f64 },

    #[error("disc scale rho0 must be strictly positive, got {0}")]
    NonPositiveScale(f64),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("profile is singular at the origin (branch {branch}, n = {n})")]
    SingularOrigin { branch: char, n: f64 },

    #[error("superposed profiles must share params and branch and differ in sign")]
    MismatchedSpecs,

    #[error("step size fell below {floor:e} at rho = {rho}")]
    StepSizeUnderflow {
        rho: f64,
        floor: f64,
        last_good: Box<SpinorState>,
    },

    #[error("integrator produced a non-finite state at rho = {rho}")]
    NonFiniteState { rho: f64 },

    #[error("quadrature did not reach tolerance: estimate {value} +/- {error}")]
    ToleranceNotMet { value: f64, error: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
