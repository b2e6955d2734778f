use crate::dg::DGField;
use crate::exact::binomial;

use super::{BoundaryPolynomial, PsiacError, SymmetricFilter};

/// `β(z) = Σ_{i=ρ+1}^{2ρ+1} C(2ρ+1, i) (1 − z)^(2ρ+1−i) z^i`: zero with `ρ`
/// vanishing derivatives at `z = 0`, one with `ρ` vanishing derivatives at
/// `z = 1`. Degree `2ρ` cannot do both: with the same 0/1 Bernstein
/// coefficients, `1 − β` would only vanish to order `ρ − 1` at `z = 1`.
pub fn blend_weight(z: f64, rho: usize) -> f64 {
    let z = z.clamp(0.0, 1.0);
    let n = 2 * rho + 1;
    (rho + 1..=n)
        .map(|i| {
            binomial(n as u32, i as u32).to_f64()
                * (1.0 - z).powi((n - i) as i32)
                * z.powi(i as i32)
        })
        .sum()
}

/// Transition from the boundary filter at `a1` to the interior filter at
/// `a2` (either orientation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blend {
    pub a1: f64,
    pub a2: f64,
    pub rho: usize,
}

impl Blend {
    pub fn new(a1: f64, a2: f64, rho: usize) -> Result<Self, PsiacError> {
        if rho == 0 || !(a1 - a2).is_normal() {
            return Err(PsiacError::EmptyOverlap { a1, a2 });
        }
        Ok(Blend { a1, a2, rho })
    }

    /// Default strip of two elements past a boundary region ending at
    /// `edge`, heading towards the interior in direction `sign`.
    pub fn after(edge: f64, h: f64, sign: f64, rho: usize) -> Result<Self, PsiacError> {
        Blend::new(edge, edge + sign * 2.0 * h, rho)
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = if self.a1 < self.a2 {
            (self.a1, self.a2)
        } else {
            (self.a2, self.a1)
        };
        (lo..=hi).contains(&x)
    }

    pub fn z(&self, x: f64) -> f64 {
        (x - self.a1) / (self.a2 - self.a1)
    }

    pub fn beta(&self, x: f64) -> f64 {
        blend_weight(self.z(x), self.rho)
    }

    /// `(1 − β) · boundary + β · interior`.
    pub fn combine(&self, x: f64, boundary: f64, interior: f64) -> f64 {
        let b = self.beta(x);
        (1.0 - b) * boundary + b * interior
    }
}

/// Filtered output over the whole domain: boundary polynomials at the ends,
/// the symmetric filter inside, blended across the transition strips.
#[derive(Debug, Clone)]
pub struct BlendedEvaluator<'a> {
    pub field: &'a DGField,
    pub left: BoundaryPolynomial,
    pub right: BoundaryPolynomial,
    pub interior: &'a SymmetricFilter,
    pub left_blend: Option<Blend>,
    pub right_blend: Option<Blend>,
}

impl<'a> BlendedEvaluator<'a> {
    /// With `rho = None` the boundary polynomials hand over abruptly at the
    /// edge of their regions.
    pub fn new(
        field: &'a DGField,
        left: BoundaryPolynomial,
        right: BoundaryPolynomial,
        interior: &'a SymmetricFilter,
        rho: Option<usize>,
    ) -> Result<Self, PsiacError> {
        let h = field.mesh.h();
        let (left_blend, right_blend) = match rho {
            Some(rho) => (
                Some(Blend::after(left.region.1, h, 1.0, rho)?),
                Some(Blend::after(right.region.0, h, -1.0, rho)?),
            ),
            None => (None, None),
        };
        Ok(BlendedEvaluator {
            field,
            left,
            right,
            interior,
            left_blend,
            right_blend,
        })
    }

    /// End of the left strip and start of the right strip (the extent of
    /// boundary-influenced output, transition included).
    pub fn boundary_extent(&self) -> (f64, f64) {
        (
            self.left_blend.map_or(self.left.region.1, |b| b.a2),
            self.right_blend.map_or(self.right.region.0, |b| b.a2),
        )
    }

    pub fn eval(&self, x: f64) -> Result<f64, PsiacError> {
        if x <= self.left.region.1 {
            return Ok(self.left.eval(x));
        }
        if x >= self.right.region.0 {
            return Ok(self.right.eval(x));
        }
        for (blend, poly) in [
            (&self.left_blend, &self.left),
            (&self.right_blend, &self.right),
        ] {
            if let Some(b) = blend {
                if b.contains(x) {
                    return Ok(b.combine(x, poly.eval(x), self.interior.eval(self.field, x)?));
                }
            }
        }
        self.interior.eval(self.field, x)
    }
}
