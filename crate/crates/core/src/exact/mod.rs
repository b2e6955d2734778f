//! Exact rational arithmetic: scalars, dense matrices and polynomials.
//!
//! Every filter matrix is assembled here before any conversion to binary
//! floating point.

mod matrix;
mod poly;
mod rational;

pub use matrix::RatMatrix;
pub use poly::RatPoly;
pub use rational::{binomial, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix dimensions do not match")]
    DimensionMismatch,
    #[error("cannot parse `{0}` as a rational")]
    Parse(String),
}

/// Solves the square system `a · x = b` exactly.
pub fn solve_exact(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix, ExactError> {
    a.solve_exact(b)
}

pub fn invert_exact(a: &RatMatrix) -> Result<RatMatrix, ExactError> {
    a.invert_exact()
}
