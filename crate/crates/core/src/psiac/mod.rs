//! Boundary and interior filtering of DG fields.
//!
//! A boundary kernel evaluated at `x` reads DG data from a fixed window of
//! whole elements at the end of the domain; only its coefficients move with
//! `x`. Contracting the data with `Q = T·A·C` therefore yields one polynomial
//! in `z = (x − x0)/h` over the whole boundary region, where `x0` is the
//! region's inner anchor.

mod blend;
mod boundary;
mod interior;
mod reference;
mod tmatrix;

pub use blend::{blend_weight, Blend, BlendedEvaluator};
pub use boundary::{
    filter_boundary, filter_boundary_derivative, filter_boundary_exact, BoundaryFilter,
    BoundaryPolynomial, ExactBoundaryPolynomial, ExactField,
};
pub use interior::SymmetricFilter;
pub use reference::{reference_convolve, ConvolutionKernel};
pub use tmatrix::{boundary_vector, endpoint_vector, np0_t_matrix, q_matrix, t_matrix, QMatrix};

use crate::filters::{FilterError, Side};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PsiacError {
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("kernel support width must be a whole number of elements")]
    NonIntegralSupport,
    #[error("boundary window needs {needed} elements but the mesh has {available}")]
    MeshTooCoarse { needed: usize, available: usize },
    #[error("x = {x} is outside the interior region [{lo}, {hi}]")]
    OutsideInteriorRegion { x: f64, lo: f64, hi: f64 },
    #[error("kernel window at x = {x} leaves the domain")]
    WindowOutOfDomain { x: f64 },
    #[error("a {0:?} kernel cannot be used here")]
    WrongSide(Side),
    #[error("blend overlap [{a1}, {a2}] is empty or ρ = 0")]
    EmptyOverlap { a1: f64, a2: f64 },
    #[error("field degree {field} does not match filter data degree {filter}")]
    DegreeMismatch { field: usize, filter: usize },
}
