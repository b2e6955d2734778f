use crate::dg::DGField;
use crate::exact::Rational;
use crate::filters::{static_coefficients, FilterSpec, Side};
use crate::quadrature::GaussLegendre;
use crate::spline::PiecewiseF64;

use super::interior::convolve;
use super::PsiacError;

/// A kernel frozen at one evaluation point, for brute-force convolution.
#[derive(Debug, Clone)]
pub struct ConvolutionKernel {
    pub kernel: PiecewiseF64,
}

impl ConvolutionKernel {
    /// The static kernel of `spec` (no shift).
    pub fn fixed(spec: &FilterSpec) -> Result<Self, PsiacError> {
        let c = static_coefficients(spec)?;
        Ok(ConvolutionKernel {
            kernel: spec.kernel(&c).to_f64(),
        })
    }

    /// The boundary kernel of `spec` as it stands at `x`: knots moved by
    /// `z = (x − x0)/h` and coefficients re-solved exactly for those knots.
    pub fn boundary_at(spec: &FilterSpec, field: &DGField, x: f64) -> Result<Self, PsiacError> {
        let h = field.mesh.h();
        let x0 = match spec.side() {
            Side::Left => field.mesh.a + h * spec.knots().last().to_f64(),
            Side::Right => field.mesh.b + h * spec.knots().first().to_f64(),
            Side::Interior => return Err(PsiacError::WrongSide(Side::Interior)),
        };
        let z = Rational::from_f64((x - x0) / h).ok_or(PsiacError::WindowOutOfDomain { x })?;
        let shifted = spec.shifted(&z);
        let c = static_coefficients(&shifted)?;
        Ok(ConvolutionKernel {
            kernel: shifted.kernel(&c).to_f64(),
        })
    }
}

/// `∫ K(σ) u(x − hσ) dσ` by 10-point Gauss–Legendre on every piece of the
/// common refinement of kernel breakpoints and mesh nodes.
pub fn reference_convolve(
    kernel: &ConvolutionKernel,
    field: &DGField,
    x: f64,
) -> Result<f64, PsiacError> {
    convolve(&kernel.kernel, &GaussLegendre::new(10), field, x)
}
