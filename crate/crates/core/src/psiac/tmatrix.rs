use crate::exact::{RatMatrix, RatPoly, Rational};
use crate::filters::{shifted_coefficient_polynomials, FilterSpec, Side};
use crate::spline::{bernstein_poly, unit_bspline_piecewise};

use super::PsiacError;

/// Support width `t_n − t_0` as a whole number of elements.
pub(crate) fn window_elements(spec: &FilterSpec) -> Result<usize, PsiacError> {
    spec.support_width()
        .to_i64()
        .and_then(|w| usize::try_from(w).ok())
        .ok_or(PsiacError::NonIntegralSupport)
}

/// `T[e(D+1) + ℓ][c] = ∫ φ_ℓ(y − e) B(y | τ_c) dy` over the data window in
/// mesh units (`y = 0` at the window's outer end for the left side, inner
/// end for the right), with `τ_c = t_n − reverse(window knots)`.
///
/// Columns follow position in the window, i.e. kernel index reversed. The
/// mesh width cancels (`B` scales as `1/h`, `dx` as `h`), so `T` depends
/// only on the spec and the data degree `D`.
pub fn t_matrix(spec: &FilterSpec, data_degree: usize) -> Result<RatMatrix, PsiacError> {
    if spec.side() == Side::Interior {
        return Err(PsiacError::WrongSide(Side::Interior));
    }
    let span = window_elements(spec)?;
    let r = spec.r();
    let np = data_degree + 1;
    let basis: Vec<RatPoly> = (0..np).map(|l| bernstein_poly(data_degree, l)).collect();
    let tn = spec.knots().last().clone();
    let mut t = RatMatrix::zeros(span * np, r + 1);
    for col in 0..=r {
        let j = r - col;
        let reflected = spec.window_knots(j).reflected(&tn);
        let b = unit_bspline_piecewise(&reflected, spec.windows()[j].degree)
            .map_err(crate::filters::FilterError::from)?;
        for (piece, w) in b.pieces().iter().zip(b.breakpoints().windows(2)) {
            let first = w[0].floor().to_i64().expect("small knots").max(0) as usize;
            for e in first..span {
                let lo_e = Rational::from_integer(e as i64);
                let hi_e = Rational::from_integer(e as i64 + 1);
                if hi_e <= w[0] {
                    continue;
                }
                if lo_e >= w[1] {
                    break;
                }
                let lo = if lo_e > w[0] {
                    lo_e.clone()
                } else {
                    w[0].clone()
                };
                let hi = if hi_e < w[1] { hi_e } else { w[1].clone() };
                for (l, phi) in basis.iter().enumerate() {
                    let shifted = RatPoly::with_center(phi.coeffs().to_vec(), lo_e.clone());
                    t[(e * np + l, col)] += (&shifted * piece).integrate(&lo, &hi);
                }
            }
        }
    }
    Ok(t)
}

/// Piecewise-constant closed form `I_{3d+1} ⊗ 𝟙_{D+1} / (D+1)`.
pub fn np0_t_matrix(d: usize, data_degree: usize) -> RatMatrix {
    let cols = 3 * d + 1;
    let np = data_degree + 1;
    let v = Rational::new(1, np as i64);
    let mut t = RatMatrix::zeros(cols * np, cols);
    for c in 0..cols {
        for l in 0..np {
            t[(c * np + l, c)] = v.clone();
        }
    }
    t
}

/// `Q = T·A·C`: DG coefficients of the window, times `Q`, give the
/// coefficients of the filtered output in powers of `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    pub exact: RatMatrix,
    values: Vec<f64>,
}

impl QMatrix {
    pub fn rows(&self) -> usize {
        self.exact.rows()
    }

    pub fn cols(&self) -> usize {
        self.exact.cols()
    }

    /// Row-major `f64` snapshot.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `u · Q` for a row vector `u`.
    pub fn contract(&self, u: &[f64]) -> Vec<f64> {
        let cols = self.cols();
        let mut out = vec![0.0; cols];
        for (ui, row) in u.iter().zip(self.values.chunks(cols)) {
            for (o, q) in out.iter_mut().zip(row) {
                *o += ui * q;
            }
        }
        out
    }

    pub fn contract_exact(&self, u: &[Rational]) -> Vec<Rational> {
        (0..self.cols())
            .map(|c| {
                u.iter()
                    .enumerate()
                    .map(|(i, ui)| ui * &self.exact[(i, c)])
                    .sum()
            })
            .collect()
    }
}

pub fn q_matrix(spec: &FilterSpec, data_degree: usize) -> Result<QMatrix, PsiacError> {
    let t = t_matrix(spec, data_degree)?;
    let c = shifted_coefficient_polynomials(spec)?.matrix;
    let exact = t
        .checked_mul(&c.reverse_rows())
        .expect("T columns match kernel size");
    let values = exact.to_f64();
    Ok(QMatrix { exact, values })
}

/// `Q · [z^m]`: weights of the window's DG coefficients in the filtered value
/// at `x = x0 + h z`.
pub fn boundary_vector(q: &QMatrix, z: &Rational) -> Vec<Rational> {
    let p = crate::filters::powers(z, q.cols());
    (0..q.rows())
        .map(|i| (0..q.cols()).map(|m| &q.exact[(i, m)] * &p[m]).sum())
        .collect()
}

/// [`boundary_vector`] at the domain end itself (`z = −t_n` on the left,
/// `z = −t_0` on the right).
pub fn endpoint_vector(spec: &FilterSpec, data_degree: usize) -> Result<Vec<Rational>, PsiacError> {
    let q = q_matrix(spec, data_degree)?;
    let z = match spec.side() {
        Side::Right => -spec.knots().first(),
        _ => -spec.knots().last(),
    };
    Ok(boundary_vector(&q, &z))
}
