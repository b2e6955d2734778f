use crate::dg::DGField;
use crate::filters::{static_coefficients, FilterSpec, Side};
use crate::quadrature::GaussLegendre;
use crate::spline::PiecewiseF64;

use super::PsiacError;

/// `∫ K(σ) u(x − hσ) dσ` with `K` in mesh units. The integral is split at
/// kernel breakpoints and at mesh nodes so every piece is a polynomial.
pub(crate) fn convolve(
    kernel: &PiecewiseF64,
    gauss: &GaussLegendre,
    field: &DGField,
    x: f64,
) -> Result<f64, PsiacError> {
    let h = field.mesh.h();
    let (s_lo, s_hi) = kernel.support();
    let tol = 1e-9 * h;
    if x - h * s_hi < field.mesh.a - tol || x - h * s_lo > field.mesh.b + tol {
        return Err(PsiacError::WindowOutOfDomain { x });
    }
    let mut cuts: Vec<f64> = kernel.breakpoints.clone();
    // Mesh nodes x_i map to σ = (x − x_i)/h.
    let first = ((x - h * s_hi - field.mesh.a) / h).ceil().max(0.0) as usize;
    let last = (((x - h * s_lo - field.mesh.a) / h).floor().max(0.0) as usize).min(field.mesh.n);
    for i in first..=last {
        let s = (x - field.mesh.node(i)) / h;
        if s > s_lo && s < s_hi {
            cuts.push(s);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo < 1e-15 {
            continue;
        }
        let mid = x - h * (lo + hi) / 2.0;
        let e = field.mesh.element_of(mid);
        let piece = kernel.breakpoints[1..].partition_point(|&b| b <= (lo + hi) / 2.0);
        let coeffs = &kernel.pieces[piece];
        let base = kernel.breakpoints[piece];
        total += gauss.integrate(lo, hi, |s| {
            let t = s - base;
            let k = coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
            k * field.eval_on(e, x - h * s)
        });
    }
    Ok(total)
}

/// The symmetric kernel, valid on `[a + μh, b − μh]`.
#[derive(Debug, Clone)]
pub struct SymmetricFilter {
    spec: FilterSpec,
    kernel: PiecewiseF64,
    gauss: GaussLegendre,
    max_data_degree: usize,
}

impl SymmetricFilter {
    pub fn from_spec(spec: &FilterSpec) -> Result<Self, PsiacError> {
        if spec.side() != Side::Interior {
            return Err(PsiacError::WrongSide(spec.side()));
        }
        let c = static_coefficients(spec)?;
        let kernel = spec.kernel(&c).to_f64();
        let max_data_degree = 2 * spec.d();
        Ok(SymmetricFilter {
            spec: spec.clone(),
            gauss: gauss_for(spec, max_data_degree),
            kernel,
            max_data_degree,
        })
    }

    pub fn spec(&self) -> &FilterSpec {
        &self.spec
    }

    pub fn kernel(&self) -> &PiecewiseF64 {
        &self.kernel
    }

    pub fn region(&self, field: &DGField) -> (f64, f64) {
        let mu = self.spec.mu().to_f64() * field.mesh.h();
        (field.mesh.a + mu, field.mesh.b - mu)
    }

    pub fn eval(&self, field: &DGField, x: f64) -> Result<f64, PsiacError> {
        let (lo, hi) = self.region(field);
        let tol = 1e-12 * (field.mesh.b - field.mesh.a);
        if x < lo - tol || x > hi + tol {
            return Err(PsiacError::OutsideInteriorRegion { x, lo, hi });
        }
        if field.d <= self.max_data_degree {
            convolve(&self.kernel, &self.gauss, field, x)
        } else {
            convolve(&self.kernel, &gauss_for(&self.spec, field.d), field, x)
        }
    }
}

/// Gauss rule exact for kernel pieces times data of degree `data_degree`.
fn gauss_for(spec: &FilterSpec, data_degree: usize) -> GaussLegendre {
    let k = spec.windows().iter().map(|w| w.degree).max().unwrap_or(0);
    GaussLegendre::new((k + data_degree) / 2 + 1)
}
