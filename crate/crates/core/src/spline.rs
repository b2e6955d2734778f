//! Unit-integral B-splines and Bernstein-Bézier polynomials.
//!
//! `B(x | t)` is normalized to integrate to one,
//! `B = (k + 1) / (t[k+1] - t[0]) · N`, where `N` is the Cox–de Boor
//! B-spline. Knots are exact rationals throughout; only [`eval_unit_bspline`]
//! and the `f64` snapshots work in floating point.

use crate::exact::{binomial, RatPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SplineError {
    #[error("knot sequence is not nondecreasing")]
    NonMonotone,
    #[error("a degree-{degree} B-spline needs {expected} knots, got {got}")]
    WrongKnotCount {
        degree: usize,
        expected: usize,
        got: usize,
    },
    #[error("B-spline support has zero width")]
    DegenerateSupport,
}

/// Nondecreasing sequence of rational knots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnotVector(Vec<Rational>);

impl KnotVector {
    pub fn new(knots: Vec<Rational>) -> Result<Self, SplineError> {
        if knots.windows(2).any(|w| w[0] > w[1]) {
            return Err(SplineError::NonMonotone);
        }
        Ok(KnotVector(knots))
    }

    pub fn from_i64(knots: &[i64]) -> Result<Self, SplineError> {
        Self::new(knots.iter().map(|&k| Rational::from_integer(k)).collect())
    }

    /// `first, first + 1, …, last` (unit steps, possibly half-integral).
    pub fn arithmetic(first: &Rational, count: usize) -> Self {
        KnotVector(
            (0..count)
                .map(|i| first + Rational::from_integer(i as i64))
                .collect(),
        )
    }

    pub fn knots(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> &Rational {
        &self.0[0]
    }

    pub fn last(&self) -> &Rational {
        &self.0[self.0.len() - 1]
    }

    pub fn window(&self, start: usize, len: usize) -> KnotVector {
        KnotVector(self.0[start..start + len].to_vec())
    }

    pub fn shifted(&self, by: &Rational) -> KnotVector {
        KnotVector(self.0.iter().map(|t| t + by).collect())
    }

    /// `c - t` in reversed order, the knots of `s ↦ B(c - s | t)`.
    pub fn reflected(&self, about: &Rational) -> KnotVector {
        KnotVector(self.0.iter().rev().map(|t| about - t).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Rational::to_f64).collect()
    }

    /// Distinct knot values in increasing order.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut b = self.0.clone();
        b.dedup();
        b
    }

    fn check_single(&self, k: usize) -> Result<(), SplineError> {
        if self.0.len() != k + 2 {
            return Err(SplineError::WrongKnotCount {
                degree: k,
                expected: k + 2,
                got: self.0.len(),
            });
        }
        if self.first() == self.last() {
            return Err(SplineError::DegenerateSupport);
        }
        Ok(())
    }
}

/// Piecewise polynomial with exact breakpoints, zero outside
/// `[breakpoints[0], breakpoints[last]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<Rational>,
    pieces: Vec<RatPoly>,
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<RatPoly>) -> Self {
        assert_eq!(
            breakpoints.len(),
            pieces.len() + 1,
            "one piece per interval"
        );
        assert!(
            breakpoints.windows(2).all(|w| w[0] < w[1]),
            "breakpoints must increase"
        );
        PiecewisePolynomial {
            breakpoints,
            pieces,
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[RatPoly] {
        &self.pieces
    }

    pub fn support(&self) -> (&Rational, &Rational) {
        (
            &self.breakpoints[0],
            &self.breakpoints[self.breakpoints.len() - 1],
        )
    }

    /// Right-continuous evaluation; the last breakpoint takes the left limit.
    pub fn eval(&self, x: &Rational) -> Rational {
        match self.locate(|b| b <= x, x == self.support().1) {
            Some(i) => self.pieces[i].eval(x),
            None => Rational::zero(),
        }
    }

    fn locate(&self, le: impl Fn(&Rational) -> bool, at_end: bool) -> Option<usize> {
        let n = self.pieces.len();
        if at_end {
            return Some(n - 1);
        }
        if !le(&self.breakpoints[0]) || le(&self.breakpoints[n]) {
            return None;
        }
        Some(self.breakpoints[1..].partition_point(|b| le(b)))
    }

    /// `∫ p(x) · x^m dx` over the whole support.
    pub fn moment(&self, m: usize) -> Rational {
        let mono = RatPoly::monomial(m);
        self.integrate_against(&mono)
    }

    pub fn integral(&self) -> Rational {
        self.moment(0)
    }

    /// `∫ p(x) · g(x) dx` over the support.
    pub fn integrate_against(&self, g: &RatPoly) -> Rational {
        self.pieces
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(p, w)| (p * g).integrate(&w[0], &w[1]))
            .sum()
    }

    /// `∫_lo^hi p(x) · g(x) dx` with the integration window clipped to the
    /// support.
    pub fn integrate_against_on(&self, g: &RatPoly, lo: &Rational, hi: &Rational) -> Rational {
        self.pieces
            .iter()
            .zip(self.breakpoints.windows(2))
            .filter_map(|(p, w)| {
                let a = if &w[0] > lo { &w[0] } else { lo };
                let b = if &w[1] < hi { &w[1] } else { hi };
                (a < b).then(|| (p * g).integrate(a, b))
            })
            .sum()
    }

    /// Linear combination `Σ c_i p_i` on the union of the breakpoints.
    pub fn combine(terms: &[(Rational, &PiecewisePolynomial)]) -> PiecewisePolynomial {
        let mut breaks: Vec<Rational> = terms
            .iter()
            .flat_map(|(_, p)| p.breakpoints.iter().cloned())
            .collect();
        breaks.sort();
        breaks.dedup();
        let pieces = breaks
            .windows(2)
            .map(|w| {
                let mid = (&w[0] + &w[1]) / Rational::from_integer(2);
                terms.iter().fold(RatPoly::zero(), |acc, (c, p)| {
                    match p.piece_containing(&mid) {
                        Some(piece) => &acc + &piece.scale(c),
                        None => acc,
                    }
                })
            })
            .collect();
        PiecewisePolynomial::new(breaks, pieces)
    }

    fn piece_containing(&self, x: &Rational) -> Option<&RatPoly> {
        self.locate(|b| b <= x, false).map(|i| &self.pieces[i])
    }

    /// Float snapshot with each piece re-expanded about its left breakpoint.
    pub fn to_f64(&self) -> PiecewiseF64 {
        let pieces = self
            .pieces
            .iter()
            .zip(&self.breakpoints)
            .map(|(p, lo)| p.recenter(lo).to_f64_coeffs())
            .collect();
        PiecewiseF64 {
            breakpoints: self.breakpoints.iter().map(Rational::to_f64).collect(),
            pieces,
        }
    }
}

/// `f64` piecewise polynomial; piece `i` is stored in powers of
/// `(x - breakpoints[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseF64 {
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Vec<f64>>,
}

impl PiecewiseF64 {
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.pieces.len();
        let (lo, hi) = (self.breakpoints[0], self.breakpoints[n]);
        if x < lo || x > hi {
            return 0.0;
        }
        let i = if x == hi {
            n - 1
        } else {
            self.breakpoints[1..].partition_point(|&b| b <= x)
        };
        let t = x - self.breakpoints[i];
        self.pieces[i].iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn support(&self) -> (f64, f64) {
        (
            self.breakpoints[0],
            self.breakpoints[self.breakpoints.len() - 1],
        )
    }
}

/// Unit-integral B-spline `B(x | knots)` of degree `k`, evaluated by the
/// Cox–de Boor recursion (`0/0 := 0` for repeated knots).
pub fn eval_unit_bspline(knots: &KnotVector, k: usize, x: f64) -> Result<f64, SplineError> {
    knots.check_single(k)?;
    let t = knots.to_f64();
    let (lo, hi) = (t[0], t[k + 1]);
    if x < lo || x > hi {
        return Ok(0.0);
    }
    // Interval index: right-continuous, last nonempty interval at the right end.
    let span = if x == hi {
        (0..=k)
            .rev()
            .find(|&i| t[i] < t[i + 1])
            .expect("nondegenerate")
    } else {
        (0..=k)
            .rev()
            .find(|&i| t[i] <= x)
            .expect("x inside support")
    };
    let mut n: Vec<f64> = (0..=k).map(|i| if i == span { 1.0 } else { 0.0 }).collect();
    for p in 1..=k {
        for i in 0..=k - p {
            let left = if t[i + p] > t[i] {
                (x - t[i]) / (t[i + p] - t[i]) * n[i]
            } else {
                0.0
            };
            let right = if t[i + p + 1] > t[i + 1] {
                (t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1]) * n[i + 1]
            } else {
                0.0
            };
            n[i] = left + right;
        }
    }
    Ok(n[0] * (k as f64 + 1.0) / (hi - lo))
}

/// Exact piecewise-polynomial form of the unit-integral B-spline.
pub fn unit_bspline_piecewise(
    knots: &KnotVector,
    k: usize,
) -> Result<PiecewisePolynomial, SplineError> {
    knots.check_single(k)?;
    let t = knots.knots();
    let breaks = knots.breakpoints();
    let norm = Rational::from_integer(k as i64 + 1) / (&t[k + 1] - &t[0]);
    let pieces = breaks
        .windows(2)
        .map(|w| {
            // Cox–de Boor on polynomials, restricted to the interval [w0, w1).
            let mut n: Vec<RatPoly> = (0..=k)
                .map(|i| {
                    if t[i] <= w[0] && w[1] <= t[i + 1] && t[i] < t[i + 1] {
                        RatPoly::constant(Rational::one())
                    } else {
                        RatPoly::zero()
                    }
                })
                .collect();
            for p in 1..=k {
                for i in 0..=k - p {
                    let mut acc = RatPoly::zero();
                    if t[i + p] > t[i] && !n[i].is_zero() {
                        let inv = Rational::one() / (&t[i + p] - &t[i]);
                        let f = RatPoly::linear(-(&t[i] * &inv), inv);
                        acc = &acc + &(&f * &n[i]);
                    }
                    if t[i + p + 1] > t[i + 1] && !n[i + 1].is_zero() {
                        let inv = Rational::one() / (&t[i + p + 1] - &t[i + 1]);
                        let f = RatPoly::linear(&t[i + p + 1] * &inv, -inv);
                        acc = &acc + &(&f * &n[i + 1]);
                    }
                    n[i] = acc;
                }
            }
            n[0].scale(&norm)
        })
        .collect();
    Ok(PiecewisePolynomial::new(breaks, pieces))
}

/// `∫ B(s | knots) s^m ds = h_m(knots) / C(m + k + 1, m)`, where `h_m` is the
/// complete homogeneous symmetric polynomial (sum of all degree-`m`
/// monomials) in the knots.
pub fn bspline_moment(knots: &KnotVector, k: usize, m: usize) -> Result<Rational, SplineError> {
    knots.check_single(k)?;
    Ok(complete_homogeneous(knots.knots(), m) / binomial((m + k + 1) as u32, m as u32))
}

/// `h_m(t_0, …, t_p)` via `h_m(t_0..t_p) = h_m(t_0..t_{p-1}) + t_p · h_{m-1}(t_0..t_p)`.
pub fn complete_homogeneous(vars: &[Rational], m: usize) -> Rational {
    let mut h = vec![Rational::zero(); m + 1];
    h[0] = Rational::one();
    for v in vars {
        for deg in 1..=m {
            let add = v * &h[deg - 1];
            h[deg] += add;
        }
    }
    h.swap_remove(m)
}

/// Bernstein-Bézier basis function `φ_ℓ^i` of degree `d` on the element
/// `[i·h, (i+1)·h]`, normalized so that `φ(h x | h s) = φ(x | s)`:
/// `C(d, ℓ) η^ℓ (1 - η)^(d-ℓ)` with `η = x/h - i`, zero off the element.
pub fn bernstein_basis(d: usize, i: usize, l: usize, x: f64, h: f64) -> f64 {
    let eta = x / h - i as f64;
    if !(0.0..=1.0).contains(&eta) || l > d {
        return 0.0;
    }
    let c = (0..l).fold(1.0, |acc, j| acc * (d - j) as f64 / (j + 1) as f64);
    c * eta.powi(l as i32) * (1.0 - eta).powi((d - l) as i32)
}

/// Bernstein polynomial `C(d, ℓ) η^ℓ (1 - η)^(d-ℓ)` in `η`, exactly.
pub fn bernstein_poly(d: usize, l: usize) -> RatPoly {
    let eta = RatPoly::monomial(1);
    let one_minus = RatPoly::from_i64(&[1, -1]);
    let mut p = RatPoly::constant(binomial(d as u32, l as u32));
    for _ in 0..l {
        p = &p * &eta;
    }
    for _ in 0..d - l {
        p = &p * &one_minus;
    }
    p
}
