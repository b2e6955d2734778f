use std::fmt;
use std::str::FromStr;

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Inflow values taken from the exact solution.
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemId {
    Tp1,
    Tp2,
    Tp3,
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemId::Tp1 => "tp1",
            ProblemId::Tp2 => "tp2",
            ProblemId::Tp3 => "tp3",
        })
    }
}

impl FromStr for ProblemId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tp1" | "1" => Ok(ProblemId::Tp1),
            "tp2" | "2" => Ok(ProblemId::Tp2),
            "tp3" | "3" => Ok(ProblemId::Tp3),
            _ => Err(format!("unknown problem `{s}` (expected tp1, tp2 or tp3)")),
        }
    }
}

/// `u_τ + (κ u)_x = ρ` on `[a, b]`.
#[derive(Debug, Clone, Copy)]
pub struct TestProblem {
    pub name: &'static str,
    pub a: f64,
    pub b: f64,
    pub boundary: Boundary,
    pub kappa: fn(f64, f64) -> f64,
    pub rho: fn(f64, f64) -> f64,
    /// Exact solution `u(x, τ)`; also supplies the initial condition and
    /// Dirichlet inflow data.
    pub exact: fn(f64, f64) -> f64,
    /// Upper bound for `|κ|`, used for the time step.
    pub max_speed: f64,
}

impl TestProblem {
    pub fn get(id: ProblemId) -> TestProblem {
        match id {
            ProblemId::Tp1 => TestProblem {
                name: "tp1",
                a: 0.0,
                b: 1.0,
                boundary: Boundary::Periodic,
                kappa: |_, _| 1.0,
                rho: |_, _| 0.0,
                exact: |x, t| (2.0 * PI * (x - t)).sin(),
                max_speed: 1.0,
            },
            ProblemId::Tp2 => TestProblem {
                name: "tp2",
                a: 0.0,
                b: 2.0 * PI,
                boundary: Boundary::Dirichlet,
                kappa: |_, _| 1.0,
                rho: |_, _| 0.0,
                exact: |x, t| (x - t).sin(),
                max_speed: 1.0,
            },
            ProblemId::Tp3 => TestProblem {
                name: "tp3",
                a: 0.0,
                b: 2.0 * PI,
                boundary: Boundary::Periodic,
                kappa: |x, t| 2.0 + (x + t).sin(),
                rho: |x, t| (x - t).cos() + (2.0 * x).sin(),
                exact: |x, t| (x - t).sin(),
                max_speed: 3.0,
            },
        }
    }

    pub fn initial(&self, x: f64) -> f64 {
        (self.exact)(x, 0.0)
    }
}
