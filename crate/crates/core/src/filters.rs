//! Filter families: knot sequences, B-spline index sets and exact
//! coefficients.
//!
//! A kernel is `K(σ) = Σ_j c_j B(σ | t[s_j ..= s_j + k_j + 1])`, one unit-integral
//! B-spline per [`SplineWindow`]. Coefficients are fixed by the moment
//! conditions `∫ K(σ) σ^m dσ = δ_{m0}` for `m = 0..=r`, which is exactly
//! polynomial reproduction up to degree `r`.

use std::fmt;
use std::str::FromStr;

use crate::exact::{binomial, ExactError, RatMatrix, RatPoly, Rational};
use crate::spline::{
    bspline_moment, unit_bspline_piecewise, KnotVector, PiecewisePolynomial, SplineError,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FilterError {
    #[error("{family} filter has no {side:?} variant")]
    UnsupportedFamilySide { family: Family, side: Side },
    #[error("DG degree must be at least 1")]
    InvalidDegree,
    #[error("reproduction matrix is singular")]
    SingularReproduction,
    #[error("invalid filter spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Spline(#[from] SplineError),
}

impl From<ExactError> for FilterError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::SingularMatrix => FilterError::SingularReproduction,
            other => FilterError::InvalidSpec(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Symmetric,
    Rs,
    Srv,
    Rlkv,
    /// Piecewise-degree-`k` filter with stacked knots at the boundary end;
    /// `Np(0)` is the piecewise-constant NP₀ filter.
    Np(usize),
    /// Hand-built knots and windows.
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Symmetric => write!(f, "symmetric"),
            Family::Rs => write!(f, "RS"),
            Family::Srv => write!(f, "SRV"),
            Family::Rlkv => write!(f, "RLKV"),
            Family::Np(k) => write!(f, "NP{k}"),
            Family::Custom => write!(f, "custom"),
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "symmetric" | "sym" => Ok(Family::Symmetric),
            "rs" => Ok(Family::Rs),
            "srv" => Ok(Family::Srv),
            "rlkv" => Ok(Family::Rlkv),
            _ => lower
                .strip_prefix("np")
                .and_then(|k| k.parse().ok())
                .map(Family::Np)
                .ok_or_else(|| format!("unknown filter family `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
    Interior,
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(Side::Left),
            "right" | "r" => Ok(Side::Right),
            "interior" | "i" | "center" => Ok(Side::Interior),
            _ => Err(format!("unknown side `{s}`")),
        }
    }
}

/// One B-spline of the kernel: degree `degree` over knots
/// `t[start ..= start + degree + 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplineWindow {
    pub start: usize,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterSpec {
    family: Family,
    d: usize,
    side: Side,
    knots: KnotVector,
    windows: Vec<SplineWindow>,
    mu: Rational,
    lambda: Rational,
}

/// Builds the prototype kernel of `family` for DG degree `d`.
pub fn build_spec(family: Family, d: usize, side: Side) -> Result<FilterSpec, FilterError> {
    if d == 0 {
        return Err(FilterError::InvalidDegree);
    }
    let unsupported = FilterError::UnsupportedFamilySide { family, side };
    match (family, side) {
        (Family::Symmetric, Side::Interior) => {}
        (Family::Symmetric, _) | (_, Side::Interior) | (Family::Custom, _) => {
            return Err(unsupported)
        }
        _ => {}
    }
    let half = |num: usize| Rational::new(num as i64, 2);
    let consecutive = |count: usize, degree: usize| -> Vec<SplineWindow> {
        (0..count)
            .map(|start| SplineWindow { start, degree })
            .collect()
    };
    let (mu, knots, windows) = match family {
        Family::Symmetric | Family::Rs => {
            let mu = half(3 * d + 1);
            let t = KnotVector::arithmetic(&-&mu, 3 * d + 2);
            (mu, t, consecutive(2 * d + 1, d))
        }
        Family::Srv => {
            let mu = half(5 * d + 1);
            let t = KnotVector::arithmetic(&-&mu, 5 * d + 2);
            (mu, t, consecutive(4 * d + 1, d))
        }
        Family::Rlkv => {
            // −μ, …, μ−1 followed by μ repeated d+1 times; the extra B-spline
            // sits on the stacked end.
            let mu = half(3 * d + 1);
            let mut t = KnotVector::arithmetic(&-&mu, 3 * d + 1).knots().to_vec();
            t.extend(std::iter::repeat_n(mu.clone(), d + 1));
            let mut w = consecutive(2 * d + 1, d);
            w.push(SplineWindow {
                start: 3 * d,
                degree: d,
            });
            (mu, KnotVector::new(t)?, w)
        }
        Family::Np(k) => {
            // −μ, …, μ−2, then μ−1 and μ each repeated k+1 times.
            let mu = half(3 * d + 1);
            let one = Rational::one();
            let mut t = KnotVector::arithmetic(&-&mu, 3 * d).knots().to_vec();
            t.extend(std::iter::repeat_n(&mu - &one, k + 1));
            t.extend(std::iter::repeat_n(mu.clone(), k + 1));
            let count = t.len() - k - 1;
            (mu, KnotVector::new(t)?, consecutive(count, k))
        }
        Family::Custom => unreachable!(),
    };
    let spec = FilterSpec {
        family,
        d,
        side: if side == Side::Right {
            Side::Left
        } else {
            side
        },
        knots,
        windows,
        lambda: mu.clone(),
        mu,
    };
    Ok(match side {
        Side::Right => spec.mirrored(),
        _ => spec,
    })
}

impl FilterSpec {
    /// A hand-built kernel. `lambda` is the width of the region it serves, in
    /// mesh units; `d` records the DG degree it is meant for.
    pub fn custom(
        knots: KnotVector,
        windows: Vec<SplineWindow>,
        d: usize,
        side: Side,
        lambda: Rational,
    ) -> Result<Self, FilterError> {
        if windows.is_empty() {
            return Err(FilterError::InvalidSpec("no B-spline windows".into()));
        }
        for w in &windows {
            if w.start + w.degree + 1 >= knots.len() {
                return Err(FilterError::InvalidSpec(format!(
                    "window at {} of degree {} runs past the knots",
                    w.start, w.degree
                )));
            }
            let kn = knots.window(w.start, w.degree + 2);
            if kn.first() == kn.last() {
                return Err(SplineError::DegenerateSupport.into());
            }
        }
        let mu = (knots.last() - knots.first()) / Rational::from_integer(2);
        Ok(FilterSpec {
            family: Family::Custom,
            d,
            side,
            knots,
            windows,
            mu,
            lambda,
        })
    }

    /// Reflection `σ ↦ −σ`: knots `−reverse(t)`, windows reindexed. Left and
    /// right boundary kernels are mirrors of each other.
    pub fn mirrored(&self) -> FilterSpec {
        let n = self.knots.len() - 1;
        let knots = self.knots.reflected(&Rational::zero());
        let mut windows: Vec<SplineWindow> = self
            .windows
            .iter()
            .map(|w| SplineWindow {
                start: n - (w.start + w.degree + 1),
                degree: w.degree,
            })
            .collect();
        windows.reverse();
        let side = match self.side {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
            Side::Interior => Side::Interior,
        };
        FilterSpec {
            knots,
            windows,
            side,
            ..self.clone()
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn knots(&self) -> &KnotVector {
        &self.knots
    }

    pub fn windows(&self) -> &[SplineWindow] {
        &self.windows
    }

    /// Reproduction degree; one moment condition per B-spline.
    pub fn r(&self) -> usize {
        self.windows.len() - 1
    }

    /// Half-width of the kernel support.
    pub fn mu(&self) -> &Rational {
        &self.mu
    }

    /// Width of the boundary region served by this kernel, in mesh units.
    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    /// Support width `t_n − t_0` in mesh units.
    pub fn support_width(&self) -> Rational {
        self.knots.last() - self.knots.first()
    }

    /// Common B-spline degree, if all windows share one.
    pub fn uniform_degree(&self) -> Option<usize> {
        let k = self.windows[0].degree;
        self.windows.iter().all(|w| w.degree == k).then_some(k)
    }

    pub fn window_knots(&self, j: usize) -> KnotVector {
        let w = self.windows[j];
        self.knots.window(w.start, w.degree + 2)
    }

    pub fn bspline(&self, j: usize) -> PiecewisePolynomial {
        unit_bspline_piecewise(&self.window_knots(j), self.windows[j].degree)
            .expect("windows validated at construction")
    }

    /// Same kernel with every knot moved by `xi`.
    pub fn shifted(&self, xi: &Rational) -> FilterSpec {
        FilterSpec {
            knots: self.knots.shifted(xi),
            ..self.clone()
        }
    }

    /// Exact kernel `Σ_j c_j B_j` for a coefficient vector.
    pub fn kernel(&self, coeffs: &[Rational]) -> PiecewisePolynomial {
        let parts: Vec<PiecewisePolynomial> =
            (0..self.windows.len()).map(|j| self.bspline(j)).collect();
        let terms: Vec<(Rational, &PiecewisePolynomial)> =
            coeffs.iter().cloned().zip(parts.iter()).collect();
        PiecewisePolynomial::combine(&terms)
    }
}

/// Moment form `M[m][j] = ∫ B_j(s) s^m ds`, `m = 0..=r`. Works for mixed
/// B-spline degrees.
pub fn reproduction_matrix(spec: &FilterSpec) -> RatMatrix {
    let r = spec.r();
    let mut m = RatMatrix::zeros(r + 1, r + 1);
    for (j, w) in spec.windows().iter().enumerate() {
        let kn = spec.window_knots(j);
        for row in 0..=r {
            m[(row, j)] = bspline_moment(&kn, w.degree, row).expect("validated window");
        }
    }
    m
}

/// Power-sum form `M[m][j] = Σ_{|ω|=m} t_j^ω`, the moment form scaled row-wise
/// by `C(m+k+1, m)`. Requires a common degree `k`.
pub fn power_sum_matrix(spec: &FilterSpec) -> Option<RatMatrix> {
    spec.uniform_degree()?;
    let r = spec.r();
    let mut m = RatMatrix::zeros(r + 1, r + 1);
    for j in 0..=r {
        let kn = spec.window_knots(j);
        for row in 0..=r {
            m[(row, j)] = crate::spline::complete_homogeneous(kn.knots(), row);
        }
    }
    Some(m)
}

/// `k = 0` form `M[δ][j] = (t_{j+1}^{δ+1} − t_j^{δ+1}) / (t_{j+1} − t_j)`.
pub fn least_degree_matrix(spec: &FilterSpec) -> Option<RatMatrix> {
    if spec.uniform_degree() != Some(0) {
        return None;
    }
    let r = spec.r();
    let mut m = RatMatrix::zeros(r + 1, r + 1);
    for j in 0..=r {
        let kn = spec.window_knots(j);
        let (a, b) = (kn.first(), kn.last());
        for delta in 0..=r {
            let e = delta as u32 + 1;
            m[(delta, j)] = (b.pow(e) - a.pow(e)) / (b - a);
        }
    }
    Some(m)
}

/// Coefficients of the unshifted kernel: the solution of `M c = e_0`.
pub fn static_coefficients(spec: &FilterSpec) -> Result<Vec<Rational>, FilterError> {
    let m = reproduction_matrix(spec);
    let mut e0 = vec![Rational::zero(); spec.r() + 1];
    e0[0] = Rational::one();
    Ok(m.solve_exact(&RatMatrix::column_vector(e0))?.column(0))
}

/// Coefficients of the kernel over knots `t + ξ` as polynomials in `ξ`
/// (mesh units): `c_j(ξ) = Σ_m C[j][m] ξ^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientPolynomials {
    pub matrix: RatMatrix,
}

impl CoefficientPolynomials {
    pub fn len(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.rows() == 0
    }

    pub fn at(&self, xi: &Rational) -> Vec<Rational> {
        let powers = powers(xi, self.matrix.cols());
        (0..self.matrix.rows())
            .map(|j| {
                self.matrix
                    .row(j)
                    .iter()
                    .zip(&powers)
                    .map(|(c, p)| c * p)
                    .sum()
            })
            .collect()
    }

    pub fn at_f64(&self, xi: f64) -> Vec<f64> {
        let c = self.matrix.to_f64();
        let n = self.matrix.cols();
        c.chunks(n)
            .map(|row| row.iter().rev().fold(0.0, |acc, v| acc * xi + v))
            .collect()
    }

    pub fn polynomials(&self) -> Vec<RatPoly> {
        (0..self.matrix.rows())
            .map(|j| RatPoly::new(self.matrix.row(j).to_vec()))
            .collect()
    }
}

/// `C = M⁻¹ · diag((−1)^m)` with `M` in moment form: shifting the knots by
/// `ξ` turns the moment conditions into `M c(ξ) = ((−ξ)^m)_m`.
pub fn shifted_coefficient_polynomials(
    spec: &FilterSpec,
) -> Result<CoefficientPolynomials, FilterError> {
    let m = reproduction_matrix(spec);
    let signs: Vec<Rational> = (0..=spec.r())
        .map(|i| Rational::from_integer(if i % 2 == 0 { 1 } else { -1 }))
        .collect();
    let matrix = m.solve_exact(&RatMatrix::diagonal(&signs))?;
    Ok(CoefficientPolynomials { matrix })
}

/// The uniform-degree variant `M_pow⁻¹ · diag((−1)^ℓ C(ℓ+k+1, ℓ))`; equal to
/// [`shifted_coefficient_polynomials`] whenever it applies.
pub fn shifted_coefficient_polynomials_power_sum(
    spec: &FilterSpec,
) -> Result<Option<CoefficientPolynomials>, FilterError> {
    let (Some(k), Some(m)) = (spec.uniform_degree(), power_sum_matrix(spec)) else {
        return Ok(None);
    };
    let diag: Vec<Rational> = (0..=spec.r())
        .map(|l| {
            let b = binomial((l + k + 1) as u32, l as u32);
            if l % 2 == 0 {
                b
            } else {
                -b
            }
        })
        .collect();
    let matrix = m.solve_exact(&RatMatrix::diagonal(&diag))?;
    Ok(Some(CoefficientPolynomials { matrix }))
}

pub(crate) fn powers(x: &Rational, n: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n);
    let mut p = Rational::one();
    for _ in 0..n {
        out.push(p.clone());
        p = &p * x;
    }
    out
}

/// `Σ_j c_j ∫ B_j(s) (x − s)^δ ds` as a polynomial in `x`. Equals `x^δ` for
/// every `δ ≤ r` when `c` are reproducing coefficients.
pub fn convolve_monomial(spec: &FilterSpec, coeffs: &[Rational], delta: usize) -> RatPoly {
    // (x − s)^δ = Σ_i C(δ,i) x^i (−s)^(δ−i)
    let m = reproduction_matrix_to(spec, delta);
    let out = (0..=delta)
        .map(|i| {
            let e = delta - i;
            let sign = if e % 2 == 0 {
                Rational::one()
            } else {
                -Rational::one()
            };
            let moment: Rational = coeffs.iter().enumerate().map(|(j, c)| c * &m[(e, j)]).sum();
            binomial(delta as u32, i as u32) * sign * moment
        })
        .collect();
    RatPoly::new(out)
}

fn reproduction_matrix_to(spec: &FilterSpec, max_m: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(max_m + 1, spec.windows().len());
    for (j, w) in spec.windows().iter().enumerate() {
        let kn = spec.window_knots(j);
        for row in 0..=max_m {
            m[(row, j)] = bspline_moment(&kn, w.degree, row).expect("validated window");
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_integer(x)).collect()
    }

    pub(crate) fn ex27_spec() -> FilterSpec {
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

    #[test]
    fn symmetric_d1_structure() {
        let s = build_spec(Family::Symmetric, 1, Side::Interior).unwrap();
        assert_eq!(s.r(), 2);
        assert_eq!(s.knots().knots(), ints(&[-2, -1, 0, 1, 2]).as_slice());
        assert_eq!(s.mu(), &q(2, 1));
        assert_eq!(s.uniform_degree(), Some(1));
        assert_eq!(
            s.windows().iter().map(|w| w.start).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn np0_structures() {
        let s = build_spec(Family::Np(0), 3, Side::Left).unwrap();
        assert_eq!(s.r(), 9);
        assert_eq!(
            s.knots().knots(),
            ints(&[-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5]).as_slice()
        );
        assert_eq!(s.lambda(), &q(5, 1));

        let s = build_spec(Family::Np(0), 2, Side::Left).unwrap();
        assert_eq!(s.mu(), &q(7, 2));
        assert_eq!(s.r() + 1, 7);
        assert_eq!(s.knots().first(), &q(-7, 2));
        assert_eq!(s.knots().last(), &q(7, 2));
    }

    #[test]
    fn srv_and_rlkv_sizes() {
        for d in 1..=3 {
            let s = build_spec(Family::Srv, d, Side::Left).unwrap();
            assert_eq!(s.r(), 4 * d);
            assert_eq!(s.mu(), &q(5 * d as i64 + 1, 2));
            let s = build_spec(Family::Rlkv, d, Side::Left).unwrap();
            assert_eq!(s.r(), 2 * d + 1);
            assert_eq!(s.knots().len(), 4 * d + 2);
            let r = build_spec(Family::Rlkv, d, Side::Right).unwrap();
            let starts: Vec<usize> = r.windows().iter().map(|w| w.start).collect();
            let mut expect = vec![0];
            expect.extend(d..=3 * d);
            assert_eq!(starts, expect);
        }
    }

    #[test]
    fn side_validation() {
        assert!(matches!(
            build_spec(Family::Symmetric, 1, Side::Left),
            Err(FilterError::UnsupportedFamilySide { .. })
        ));
        assert!(matches!(
            build_spec(Family::Srv, 1, Side::Interior),
            Err(FilterError::UnsupportedFamilySide { .. })
        ));
        assert_eq!(
            build_spec(Family::Np(0), 0, Side::Left),
            Err(FilterError::InvalidDegree)
        );
    }

    #[test]
    fn matrix_forms() {
        let m = reproduction_matrix(&ex27_spec());
        assert_eq!(
            m,
            RatMatrix::from_rows(vec![vec![q(1, 1), q(1, 1)], vec![q(-3, 2), q(-1, 2)]]).unwrap()
        );
        let sym = build_spec(Family::Symmetric, 1, Side::Interior).unwrap();
        assert_eq!(
            power_sum_matrix(&sym).unwrap(),
            RatMatrix::from_i64(&[&[1, 1, 1], &[-3, 0, 3], &[7, 1, 7]])
        );
        let np = build_spec(Family::Np(0), 1, Side::Left).unwrap();
        assert_eq!(
            least_degree_matrix(&np).unwrap(),
            RatMatrix::from_i64(&[
                &[1, 1, 1, 1],
                &[-3, -1, 1, 3],
                &[7, 1, 1, 7],
                &[-15, -1, 1, 15]
            ])
        );
    }

    #[test]
    fn static_coefficient_examples() {
        let sym = build_spec(Family::Symmetric, 1, Side::Interior).unwrap();
        assert_eq!(
            static_coefficients(&sym).unwrap(),
            vec![q(-1, 12), q(7, 6), q(-1, 12)]
        );
        // The NP0 prototype is one-sided in use, but unshifted it is symmetric.
        let np = build_spec(Family::Np(0), 1, Side::Left).unwrap();
        assert_eq!(
            static_coefficients(&np).unwrap(),
            vec![q(-1, 12), q(7, 12), q(7, 12), q(-1, 12)]
        );
        assert_eq!(
            static_coefficients(&ex27_spec()).unwrap(),
            vec![q(-1, 2), q(3, 2)]
        );
    }

    #[test]
    fn ex27_coefficient_polynomials() {
        let c = shifted_coefficient_polynomials(&ex27_spec()).unwrap();
        let p = c.polynomials();
        assert_eq!(p[0], RatPoly::new(vec![q(-1, 2), q(1, 1)]));
        assert_eq!(p[1], RatPoly::new(vec![q(3, 2), q(-1, 1)]));
    }

    #[test]
    fn mirror_is_an_involution() {
        let s = build_spec(Family::Rlkv, 2, Side::Left).unwrap();
        assert_eq!(s.mirrored().mirrored(), s);
        assert_eq!(
            s.mirrored(),
            build_spec(Family::Rlkv, 2, Side::Right).unwrap()
        );
    }

    #[test]
    fn family_parsing() {
        assert_eq!("NP0".parse::<Family>(), Ok(Family::Np(0)));
        assert_eq!("np2".parse::<Family>(), Ok(Family::Np(2)));
        assert_eq!("Symmetric".parse::<Family>(), Ok(Family::Symmetric));
        assert!("foo".parse::<Family>().is_err());
    }
}
