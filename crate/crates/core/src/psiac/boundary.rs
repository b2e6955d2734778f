use crate::dg::{monomial_to_bernstein, DGField};
use crate::exact::{RatPoly, Rational};
use crate::filters::{FilterSpec, Side};

use super::tmatrix::{q_matrix, window_elements, QMatrix};
use super::PsiacError;

/// A boundary kernel prepared for data of one polynomial degree.
#[derive(Debug, Clone)]
pub struct BoundaryFilter {
    spec: FilterSpec,
    data_degree: usize,
    window: usize,
    q: QMatrix,
}

impl BoundaryFilter {
    pub fn new(spec: &FilterSpec, data_degree: usize) -> Result<Self, PsiacError> {
        Ok(BoundaryFilter {
            spec: spec.clone(),
            data_degree,
            window: window_elements(spec)?,
            q: q_matrix(spec, data_degree)?,
        })
    }

    pub fn spec(&self) -> &FilterSpec {
        &self.spec
    }

    pub fn q(&self) -> &QMatrix {
        &self.q
    }

    /// Number of elements the kernel reads.
    pub fn window(&self) -> usize {
        self.window
    }

    fn first_element(&self, n: usize) -> Result<usize, PsiacError> {
        if self.window > n {
            return Err(PsiacError::MeshTooCoarse {
                needed: self.window,
                available: n,
            });
        }
        Ok(match self.spec.side() {
            Side::Right => n - self.window,
            _ => 0,
        })
    }

    pub fn apply(&self, field: &DGField) -> Result<BoundaryPolynomial, PsiacError> {
        if field.d != self.data_degree {
            return Err(PsiacError::DegreeMismatch {
                field: field.d,
                filter: self.data_degree,
            });
        }
        let first = self.first_element(field.mesh.n)?;
        let bern = field.to_bernstein();
        let np = field.d + 1;
        let u = &bern.coeffs[first * np..(first + self.window) * np];
        let h = field.mesh.h();
        let lambda = self.spec.lambda().to_f64();
        let (x0, region) = match self.spec.side() {
            Side::Right => {
                let b = field.mesh.b;
                (
                    b + h * self.spec.knots().first().to_f64(),
                    (b - lambda * h, b),
                )
            }
            _ => {
                let a = field.mesh.a;
                (
                    a + h * self.spec.knots().last().to_f64(),
                    (a, a + lambda * h),
                )
            }
        };
        Ok(BoundaryPolynomial {
            coeffs: self.q.contract(u),
            x0,
            h,
            region,
            side: self.spec.side(),
        })
    }

    pub fn apply_exact(&self, field: &ExactField) -> Result<ExactBoundaryPolynomial, PsiacError> {
        if field.d != self.data_degree {
            return Err(PsiacError::DegreeMismatch {
                field: field.d,
                filter: self.data_degree,
            });
        }
        let first = self.first_element(field.n)?;
        let np = field.d + 1;
        let u = &field.coeffs[first * np..(first + self.window) * np];
        let x0 = match self.spec.side() {
            Side::Right => field.end() + &field.h * self.spec.knots().first(),
            _ => &field.a + &field.h * self.spec.knots().last(),
        };
        Ok(ExactBoundaryPolynomial {
            in_z: RatPoly::new(self.q.contract_exact(u)),
            x0,
            h: field.h.clone(),
        })
    }
}

/// Filtered output over a boundary region: `Σ_k coeffs[k] z^k` with
/// `z = (x − x0)/h`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPolynomial {
    pub coeffs: Vec<f64>,
    pub x0: f64,
    pub h: f64,
    pub region: (f64, f64),
    pub side: Side,
}

impl BoundaryPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let z = (x - self.x0) / self.h;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }

    /// Coefficients in powers of `(x − x0)`: `a_k = p_k / h^k`.
    pub fn physical_coefficients(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, p)| p / self.h.powi(k as i32))
            .collect()
    }

    /// `ℓ`-th derivative in `x`: differentiate in `z`, then divide by `h^ℓ`.
    pub fn derivative(&self, order: usize) -> BoundaryPolynomial {
        let scale = self.h.powi(order as i32);
        let coeffs = if order >= self.coeffs.len() {
            vec![0.0]
        } else {
            (order..self.coeffs.len())
                .map(|k| {
                    let falling = ((k - order + 1)..=k).fold(1.0, |acc, i| acc * i as f64);
                    self.coeffs[k] * falling / scale
                })
                .collect()
        };
        BoundaryPolynomial {
            coeffs,
            ..self.clone()
        }
    }
}

/// DG data with exact Bernstein coefficients on the uniform mesh
/// `a + h·[0, n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactField {
    pub a: Rational,
    pub h: Rational,
    pub n: usize,
    pub d: usize,
    pub coeffs: Vec<Rational>,
}

impl ExactField {
    pub fn from_bernstein(
        a: Rational,
        h: Rational,
        n: usize,
        d: usize,
        coeffs: Vec<Rational>,
    ) -> Self {
        assert_eq!(
            coeffs.len(),
            n * (d + 1),
            "one coefficient per basis function"
        );
        ExactField { a, h, n, d, coeffs }
    }

    /// A global polynomial of degree `≤ d` written exactly in element-wise
    /// Bernstein form.
    pub fn from_poly(p: &RatPoly, a: Rational, h: Rational, n: usize, d: usize) -> Self {
        let coeffs = (0..n)
            .flat_map(|e| {
                let start = &a + &h * Rational::from_integer(e as i64);
                let local = p.compose_affine(&h, &start);
                monomial_to_bernstein(local.coeffs(), d)
            })
            .collect();
        ExactField { a, h, n, d, coeffs }
    }

    pub fn end(&self) -> Rational {
        &self.a + &self.h * Rational::from_integer(self.n as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactBoundaryPolynomial {
    /// Polynomial in `z = (x − x0)/h`.
    pub in_z: RatPoly,
    pub x0: Rational,
    pub h: Rational,
}

impl ExactBoundaryPolynomial {
    pub fn in_x(&self) -> RatPoly {
        let inv = Rational::one() / &self.h;
        self.in_z.compose_affine(&inv, &-(&self.x0 * &inv))
    }
}

pub fn filter_boundary(
    field: &DGField,
    spec: &FilterSpec,
) -> Result<BoundaryPolynomial, PsiacError> {
    BoundaryFilter::new(spec, field.d)?.apply(field)
}

pub fn filter_boundary_exact(
    field: &ExactField,
    spec: &FilterSpec,
) -> Result<ExactBoundaryPolynomial, PsiacError> {
    BoundaryFilter::new(spec, field.d)?.apply_exact(field)
}

pub fn filter_boundary_derivative(
    field: &DGField,
    spec: &FilterSpec,
    order: usize,
) -> Result<BoundaryPolynomial, PsiacError> {
    Ok(filter_boundary(field, spec)?.derivative(order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::{l2_project, Mesh};
    use crate::filters::{build_spec, Family, SplineWindow};
    use crate::spline::KnotVector;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn ex27() -> FilterSpec {
        FilterSpec::custom(
            KnotVector::from_i64(&[-2, -1, 0]).unwrap(),
            vec![
                SplineWindow {
                    start: 0,
                    degree: 0,
                },
                SplineWindow {
                    start: 1,
                    degree: 0,
                },
            ],
            0,
            Side::Left,
            q(2, 1),
        )
        .unwrap()
    }

    fn two_indicators() -> ExactField {
        let c = [1, 0, 0, 1, 0].map(Rational::from_integer).to_vec();
        ExactField::from_bernstein(q(0, 1), q(1, 1), 5, 0, c)
    }

    #[test]
    fn two_indicator_example() {
        let out = filter_boundary_exact(&two_indicators(), &ex27()).unwrap();
        assert_eq!(out.in_x(), RatPoly::new(vec![q(3, 2), q(-1, 1)]));
        assert_eq!(out.in_x().derivative(), RatPoly::constant(q(-1, 1)));
        assert!(out.in_x().derivative().derivative().is_zero());
    }

    #[test]
    fn float_path_on_two_indicators() {
        let mesh = Mesh::new(0.0, 5.0, 5).unwrap();
        let f = l2_project(
            |x| {
                if x < 1.0 || (3.0..4.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            },
            mesh,
            0,
        );
        let p = filter_boundary(&f, &ex27()).unwrap();
        assert_eq!(p.region, (0.0, 2.0));
        for x in [0.0, 0.5, 1.3, 2.0] {
            assert!((p.eval(x) - (3.0 - 2.0 * x) / 2.0).abs() < 1e-15);
        }
        let dp = p.derivative(1);
        assert!((dp.eval(0.7) + 1.0).abs() < 1e-15);
        assert_eq!(p.derivative(0), p);
        assert!(p.derivative(2).eval(1.1).abs() < 1e-15);
    }

    #[test]
    fn mesh_too_coarse() {
        let spec = build_spec(Family::Np(0), 3, Side::Left).unwrap();
        let f = l2_project(|x| x, Mesh::new(0.0, 1.0, 9).unwrap(), 3);
        assert_eq!(
            filter_boundary(&f, &spec),
            Err(PsiacError::MeshTooCoarse {
                needed: 10,
                available: 9
            })
        );
    }

    #[test]
    fn mirrored_data_mirrors_the_polynomial() {
        let mesh = Mesh::new(0.0, 1.0, 24).unwrap();
        let u = |x: f64| (3.0 * x).sin() + x * x * x;
        let f = l2_project(u, mesh, 2);
        let g = l2_project(|x| u(1.0 - x), mesh, 2);
        for fam in [Family::Np(0), Family::Rlkv, Family::Srv] {
            let left = filter_boundary(&f, &build_spec(fam, 2, Side::Left).unwrap()).unwrap();
            let right = filter_boundary(&g, &build_spec(fam, 2, Side::Right).unwrap()).unwrap();
            for x in [0.0, 0.05, 0.1] {
                assert!((left.eval(x) - right.eval(1.0 - x)).abs() < 1e-11, "{fam}");
            }
            // Same h on both sides, so the sign rule holds for z-coefficients.
            let scale = left.coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            for (k, (a, b)) in left.coeffs.iter().zip(&right.coeffs).enumerate() {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                assert!((a - sign * b).abs() <= 1e-11 * scale, "{fam} k={k}");
            }
        }
    }

    #[test]
    fn constants_pass_through() {
        let mesh = Mesh::new(-1.0, 2.0, 30).unwrap();
        let f = l2_project(|_| 1.0, mesh, 1);
        for fam in [
            Family::Rs,
            Family::Srv,
            Family::Rlkv,
            Family::Np(0),
            Family::Np(2),
        ] {
            for side in [Side::Left, Side::Right] {
                let p = filter_boundary(&f, &build_spec(fam, 1, side).unwrap()).unwrap();
                let (lo, hi) = p.region;
                for i in 0..=4 {
                    let x = lo + (hi - lo) * i as f64 / 4.0;
                    assert!((p.eval(x) - 1.0).abs() < 1e-12, "{fam} {side:?}");
                }
            }
        }
    }
}
