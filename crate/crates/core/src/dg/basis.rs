//! Exact change of element basis between Legendre modes and Bernstein
//! polynomials on `[0, 1]`.

use crate::exact::{binomial, RatMatrix, Rational};

/// Monomial coefficients (in `η ∈ [0, 1]`) of the shifted Legendre polynomial
/// `P_ℓ(2η − 1)`.
pub fn shifted_legendre_monomials(l: usize) -> Vec<Rational> {
    (0..=l)
        .map(|k| {
            let sign = if (l + k) % 2 == 0 { 1 } else { -1 };
            Rational::from_integer(sign)
                * binomial(l as u32, k as u32)
                * binomial((l + k) as u32, k as u32)
        })
        .collect()
}

/// Bernstein coefficients of a degree-`≤ d` polynomial given by monomial
/// coefficients in `η`: `b_i = Σ_{j ≤ i} C(i, j) / C(d, j) · m_j`.
pub fn monomial_to_bernstein(m: &[Rational], d: usize) -> Vec<Rational> {
    assert!(m.len() <= d + 1, "polynomial degree exceeds basis degree");
    (0..=d)
        .map(|i| {
            m.iter()
                .enumerate()
                .take(i + 1)
                .map(|(j, mj)| mj * binomial(i as u32, j as u32) / binomial(d as u32, j as u32))
                .sum()
        })
        .collect()
}

/// Row `ℓ` holds the Bernstein coefficients of `P_ℓ(2η − 1)`, so a Legendre
/// coefficient row vector `u` maps to Bernstein coefficients `u · L`.
pub fn legendre_to_bernstein(d: usize) -> RatMatrix {
    let rows = (0..=d)
        .map(|l| monomial_to_bernstein(&shifted_legendre_monomials(l), d))
        .collect();
    RatMatrix::from_rows(rows).expect("square by construction")
}

pub fn bernstein_to_legendre(d: usize) -> RatMatrix {
    legendre_to_bernstein(d)
        .invert_exact()
        .expect("Legendre and Bernstein bases span the same space")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_integer(x)).collect()
    }

    #[test]
    fn constant_maps_to_all_ones() {
        for d in 0..6 {
            let l = legendre_to_bernstein(d);
            assert_eq!(l.row(0), ints(&vec![1; d + 1]).as_slice());
        }
    }

    #[test]
    fn linear_mode_hits_endpoints() {
        let l = legendre_to_bernstein(1);
        assert_eq!(l.row(1), ints(&[-1, 1]).as_slice());
    }

    #[test]
    fn shifted_legendre_p2() {
        // P_2(2η−1) = 6η² − 6η + 1
        assert_eq!(shifted_legendre_monomials(2), ints(&[1, -6, 6]));
    }

    #[test]
    fn round_trip_is_identity() {
        for d in 0..8 {
            let prod = &legendre_to_bernstein(d) * &bernstein_to_legendre(d);
            assert_eq!(prod, RatMatrix::identity(d + 1));
        }
    }
}
