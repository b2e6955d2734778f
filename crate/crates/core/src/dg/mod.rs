//! 1D discontinuous Galerkin solver for `u_τ + (κ u)_x = ρ`.
//!
//! Elements carry Legendre modes internally; [`DGField::to_bernstein`]
//! produces the Bernstein form the boundary filters consume.

mod basis;
mod problem;
mod solver;

pub use basis::{
    bernstein_to_legendre, legendre_to_bernstein, monomial_to_bernstein, shifted_legendre_monomials,
};
pub use problem::{Boundary, ProblemId, TestProblem};
pub use solver::{default_cfl, dg_rhs, dg_solve, dg_solve_series};

use crate::quadrature::{legendre_values, GaussLegendre};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DgError {
    #[error("solution blew up at τ = {time} (time step too large?)")]
    UnstableBlowup { time: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Uniform mesh of `n` elements on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl Mesh {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self, DgError> {
        if n == 0 || !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(DgError::InvalidInput(format!(
                "bad mesh [{a}, {b}] with {n} elements"
            )));
        }
        Ok(Mesh { a, b, n })
    }

    pub fn for_problem(p: &TestProblem, n: usize) -> Result<Self, DgError> {
        Mesh::new(p.a, p.b, n)
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    /// `x_i = a + i h`.
    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.b
        } else {
            self.a + i as f64 * self.h()
        }
    }

    /// Element containing `x` (right-continuous; `b` belongs to the last
    /// element). Points outside are clamped.
    pub fn element_of(&self, x: f64) -> usize {
        let s = ((x - self.a) / self.h()).floor();
        if s < 0.0 {
            0
        } else {
            (s as usize).min(self.n - 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementBasis {
    /// `P_ℓ(2η − 1)` with `η = (x − x_e)/h`.
    LegendreModal,
    /// `C(d, ℓ) η^ℓ (1 − η)^(d−ℓ)`.
    Bernstein,
}

/// Piecewise polynomial of degree `d` on a uniform mesh; `coeffs[e*(d+1) + ℓ]`
/// multiplies basis function `ℓ` of element `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct DGField {
    pub d: usize,
    pub mesh: Mesh,
    pub coeffs: Vec<f64>,
    pub basis: ElementBasis,
    pub time: f64,
}

impl DGField {
    pub fn zeros(mesh: Mesh, d: usize, basis: ElementBasis) -> Self {
        DGField {
            d,
            mesh,
            coeffs: vec![0.0; mesh.n * (d + 1)],
            basis,
            time: 0.0,
        }
    }

    pub fn element(&self, e: usize) -> &[f64] {
        &self.coeffs[e * (self.d + 1)..(e + 1) * (self.d + 1)]
    }

    /// Value of element `e`'s polynomial at `x` (no range check, so this also
    /// extrapolates).
    pub fn eval_on(&self, e: usize, x: f64) -> f64 {
        let eta = (x - self.mesh.node(e)) / self.mesh.h();
        let c = self.element(e);
        match self.basis {
            ElementBasis::LegendreModal => {
                let s = 2.0 * eta - 1.0;
                let (mut p0, mut p1) = (1.0, s);
                let mut acc = c[0];
                if self.d >= 1 {
                    acc += c[1] * s;
                }
                for (k, ck) in c.iter().enumerate().skip(2) {
                    let p2 = ((2 * k - 1) as f64 * s * p1 - (k - 1) as f64 * p0) / k as f64;
                    acc += ck * p2;
                    p0 = p1;
                    p1 = p2;
                }
                acc
            }
            ElementBasis::Bernstein => bernstein_sum(c, eta),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_on(self.mesh.element_of(x), x)
    }

    pub fn to_bernstein(&self) -> DGField {
        match self.basis {
            ElementBasis::Bernstein => self.clone(),
            ElementBasis::LegendreModal => self.transform(
                &legendre_to_bernstein(self.d).to_f64(),
                ElementBasis::Bernstein,
            ),
        }
    }

    pub fn to_legendre(&self) -> DGField {
        match self.basis {
            ElementBasis::LegendreModal => self.clone(),
            ElementBasis::Bernstein => self.transform(
                &bernstein_to_legendre(self.d).to_f64(),
                ElementBasis::LegendreModal,
            ),
        }
    }

    fn transform(&self, m: &[f64], basis: ElementBasis) -> DGField {
        let n = self.d + 1;
        let mut out = vec![0.0; self.coeffs.len()];
        for (src, dst) in self.coeffs.chunks(n).zip(out.chunks_mut(n)) {
            for (i, slot) in dst.iter_mut().enumerate() {
                *slot = (0..n).map(|l| src[l] * m[l * n + i]).sum();
            }
        }
        DGField {
            coeffs: out,
            basis,
            ..self.clone()
        }
    }

    /// `∫_a^b u`.
    pub fn integral(&self) -> f64 {
        let leg = self.to_legendre();
        leg.coeffs.chunks(self.d + 1).map(|c| c[0]).sum::<f64>() * self.mesh.h()
    }
}

/// `Σ_ℓ c_ℓ C(d, ℓ) η^ℓ (1 − η)^(d−ℓ)` by de Casteljau.
pub fn bernstein_sum(c: &[f64], eta: f64) -> f64 {
    let mut buf = [0.0; 32];
    let n = c.len();
    if n > buf.len() {
        let mut v = c.to_vec();
        for r in 1..n {
            for i in 0..n - r {
                v[i] = (1.0 - eta) * v[i] + eta * v[i + 1];
            }
        }
        return v[0];
    }
    buf[..n].copy_from_slice(c);
    for r in 1..n {
        for i in 0..n - r {
            buf[i] = (1.0 - eta) * buf[i] + eta * buf[i + 1];
        }
    }
    buf[0]
}

/// Element-wise L² projection (`d + 2` Gauss points per element).
pub fn l2_project(u0: impl Fn(f64) -> f64, mesh: Mesh, d: usize) -> DGField {
    let g = GaussLegendre::new(d + 2);
    let p: Vec<Vec<f64>> = g.nodes.iter().map(|&x| legendre_values(d, x)).collect();
    let h = mesh.h();
    let mut field = DGField::zeros(mesh, d, ElementBasis::LegendreModal);
    for e in 0..mesh.n {
        let xe = mesh.node(e);
        let vals: Vec<f64> = g
            .nodes
            .iter()
            .map(|&x| u0(xe + (x + 1.0) * h / 2.0))
            .collect();
        for l in 0..=d {
            let s: f64 = (0..g.len()).map(|q| g.weights[q] * vals[q] * p[q][l]).sum();
            field.coeffs[e * (d + 1) + l] = (2 * l + 1) as f64 / 2.0 * s;
        }
    }
    field
}
