//! Position-dependent SIAC boundary filters for discontinuous Galerkin output.
//!
//! Filter matrices are assembled in exact rational arithmetic ([`exact`]) and
//! only cross into `f64` when contracted with DG coefficients. The [`dg`]
//! module supplies a 1D advection solver to filter, and [`harness`] runs the
//! error and convergence-rate experiments.

pub mod dg;
pub mod exact;
pub mod filters;
pub mod harness;
pub mod par;
pub mod psiac;
pub mod quadrature;
pub mod spline;

pub use exact::{RatMatrix, RatPoly, Rational};
pub use filters::{Family, FilterSpec, Side};
