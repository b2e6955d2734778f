use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{binomial, Rational};

/// Polynomial with rational coefficients in the variable `(x - center)`,
/// coefficients in ascending powers.
#[derive(Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
    center: Rational,
}

impl RatPoly {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        Self::with_center(coeffs, Rational::zero())
    }

    pub fn with_center(coeffs: Vec<Rational>, center: Rational) -> Self {
        let mut p = RatPoly { coeffs, center };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c)).collect())
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c0 + c1·x`.
    pub fn linear(c0: Rational, c1: Rational) -> Self {
        Self::new(vec![c0, c1])
    }

    /// `x^n`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = Rational::one();
        Self::new(c)
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(Rational::is_zero) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(Rational::zero());
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn center(&self) -> &Rational {
        &self.center
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let t = x - &self.center;
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * &t + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let t = x - self.center.to_f64();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c.to_f64())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::with_center(
            self.coeffs.iter().map(|c| c * s).collect(),
            self.center.clone(),
        )
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer(i as i64))
            .collect();
        Self::with_center(coeffs, self.center.clone())
    }

    /// Antiderivative vanishing at `x = center`.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = vec![Rational::zero()];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c / Rational::from_integer(i as i64 + 1)),
        );
        Self::with_center(coeffs, self.center.clone())
    }

    /// `∫_lo^hi p(x) dx`.
    pub fn integrate(&self, lo: &Rational, hi: &Rational) -> Rational {
        let a = self.antiderivative();
        a.eval(hi) - a.eval(lo)
    }

    /// `q(y) = p(alpha·y + beta)` as a polynomial in `y` (center 0).
    pub fn compose_affine(&self, alpha: &Rational, beta: &Rational) -> Self {
        // (x - c) = alpha·y + (beta - c)
        let inner = RatPoly::linear(beta - &self.center, alpha.clone());
        let mut out = RatPoly::zero();
        for c in self.coeffs.iter().rev() {
            out = &(&out * &inner) + &RatPoly::constant(c.clone());
        }
        out
    }

    /// Same polynomial expressed around a different center.
    pub fn recenter(&self, center: &Rational) -> Self {
        // p(x) = sum c_i (x - c0)^i with x - c0 = (x - c1) + (c1 - c0)
        let delta = center - &self.center;
        let n = self.coeffs.len();
        let mut out = vec![Rational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate().take(i + 1) {
                *slot += c * binomial(i as u32, j as u32) * delta.pow((i - j) as u32);
            }
        }
        Self::with_center(out, center.clone())
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(Rational::to_f64).collect()
    }

    fn aligned<'a>(&'a self, other: &'a RatPoly) -> (std::borrow::Cow<'a, RatPoly>, &'a RatPoly) {
        if self.center == other.center {
            (std::borrow::Cow::Borrowed(self), other)
        } else {
            (std::borrow::Cow::Owned(self.recenter(&other.center)), other)
        }
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let (lhs, rhs) = self.aligned(rhs);
        let n = lhs.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| lhs.coeff(i) + rhs.coeff(i)).collect();
        RatPoly::with_center(coeffs, rhs.center.clone())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        self + &(-rhs)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::with_center(
            self.coeffs.iter().map(|c| -c).collect(),
            self.center.clone(),
        )
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        let (lhs, rhs) = self.aligned(rhs);
        let mut coeffs = vec![Rational::zero(); lhs.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in lhs.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RatPoly::with_center(coeffs, rhs.center.clone())
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| format!("({c})t^{i}"))
            .collect();
        write!(f, "{} [t = x - {}]", terms.join(" + "), self.center)
    }
}
