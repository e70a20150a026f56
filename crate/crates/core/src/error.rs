use thiserror::Error;

/// Errors produced by the numerical engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    #[error("parameter at a pole: {0}")]
    PoleAtParameter(String),

    #[error("argument outside the evaluation domain: {0}")]
    DomainError(String),

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("continued fraction denominator vanished at index {index}")]
    ZeroDenominator { index: usize },

    #[error("hypergeometric value {value:e} too close to zero")]
    ZeroTarget { value: f64 },

    #[error("maximum of the phase function is attained at the boundary x = {at} (phi = {phi_max:e})")]
    BoundaryMaximum { at: f64, phi_max: f64 },

    #[error("degenerate maximum at x = {at}: second derivative {second:e}")]
    DegenerateMaximum { at: f64, second: f64 },

    #[error("psi = {psi} does not exceed the maximum phase value {phi_max}")]
    PsiTooSmall { psi: f64, phi_max: f64 },

    #[error("non-generic parameter: {0}")]
    NonGenericParameter(String),

    #[error("outside the regime of the bound: {0}")]
    OutOfRegime(String),

    #[error("invalid sum descriptor: {0}")]
    InvalidDescriptor(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
