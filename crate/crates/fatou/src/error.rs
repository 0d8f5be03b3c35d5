use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("indeterminate value at z = {0}: numerator and denominator both vanish")]
    Indeterminate(Complex64),
    #[error("root finder did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("ambiguous partition of critical points: {0}")]
    AmbiguousPartition(String),
    #[error("no escape radius found")]
    NoEscapeRadius,
    #[error("regime violation: {0}")]
    RegimeViolation(String),
    #[error("role conflict: {0}")]
    RoleConflict(String),
    #[error("unresolved: {0}")]
    Unresolved(String),
    #[error("orbit left the analysed windows at iterate {0}")]
    OffGrid(usize),
    #[error("degenerate itinerary: {0}")]
    Degenerate(String),
    #[error("not found in range: {0}")]
    NotFound(String),
    #[error("free critical point captured by a component that does not surround the origin")]
    NonSurroundingCapture,
    #[error("unrealizable request: {0}")]
    Unrealizable(String),
    #[error("integer overflow: {0}")]
    Overflow(String),
}
