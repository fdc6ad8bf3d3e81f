use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),

    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    #[error("moment does not converge: {0}")]
    NonconvergentMoment(String),

    /// The adaptive integrator ran out of subdivisions. Carries the best
    /// estimate it reached.
    #[error("tolerance not met: estimate {estimate} with error {error:e} (target {target:e})")]
    ToleranceNotMet { estimate: Complex64, error: f64, target: f64 },

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("insufficient points: {found} usable, {required} required")]
    InsufficientPoints { found: usize, required: usize },

    #[error("no oscillation detected ({crossings} zero crossings)")]
    NoOscillation { crossings: usize },

    #[error("division guard: denominator {value:e} at tau = {tau}")]
    DivisionGuard { tau: f64, value: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}
