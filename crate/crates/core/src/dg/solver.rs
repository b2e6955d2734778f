use super::{Boundary, DGField, DgError, ElementBasis, Mesh, TestProblem};
use crate::quadrature::{legendre_and_derivative, legendre_values, GaussLegendre};

/// Default CFL number `0.1 / (2d + 1)`.
pub fn default_cfl(d: usize) -> f64 {
    0.1 / (2 * d + 1) as f64
}

/// Quadrature tables shared across right-hand-side evaluations.
struct Tables {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    p: Vec<Vec<f64>>,
    dp: Vec<Vec<f64>>,
}

impl Tables {
    fn new(d: usize) -> Self {
        let g = GaussLegendre::new((2 * d + 2).max(d + 4));
        let p = g.nodes.iter().map(|&x| legendre_values(d, x)).collect();
        let dp = g
            .nodes
            .iter()
            .map(|&x| (0..=d).map(|l| legendre_and_derivative(l, x).1).collect())
            .collect();
        Tables {
            nodes: g.nodes,
            weights: g.weights,
            p,
            dp,
        }
    }
}

/// Semi-discrete right-hand side `du/dτ` for Legendre coefficients.
pub fn dg_rhs(field: &DGField, tau: f64, problem: &TestProblem) -> Vec<f64> {
    let field = field.to_legendre();
    let tables = Tables::new(field.d);
    let mut out = vec![0.0; field.coeffs.len()];
    rhs_into(
        &field.coeffs,
        field.d,
        &field.mesh,
        tau,
        problem,
        &tables,
        &mut out,
    );
    out
}

fn rhs_into(
    u: &[f64],
    d: usize,
    mesh: &Mesh,
    tau: f64,
    problem: &TestProblem,
    t: &Tables,
    out: &mut [f64],
) {
    let n = mesh.n;
    let h = mesh.h();
    let np = d + 1;
    let right_trace = |e: usize| u[e * np..(e + 1) * np].iter().sum::<f64>();
    let left_trace = |e: usize| {
        u[e * np..(e + 1) * np]
            .iter()
            .enumerate()
            .map(|(l, c)| if l % 2 == 0 { *c } else { -c })
            .sum::<f64>()
    };
    // Upwind flux κ·u at node i; periodic meshes share the end node.
    let flux: Vec<f64> = (0..=n)
        .map(|i| {
            let node = if problem.boundary == Boundary::Periodic && i == n {
                0
            } else {
                i
            };
            let x = mesh.node(node);
            let k = (problem.kappa)(x, tau);
            let trace = if k >= 0.0 {
                match (node, problem.boundary) {
                    (0, Boundary::Periodic) => right_trace(n - 1),
                    (0, Boundary::Dirichlet) => (problem.exact)(x, tau),
                    _ => right_trace(node - 1),
                }
            } else {
                match (node, problem.boundary) {
                    (0, Boundary::Periodic) => left_trace(0),
                    (i, Boundary::Dirichlet) if i == n => (problem.exact)(x, tau),
                    _ => left_trace(node),
                }
            };
            k * trace
        })
        .collect();
    for e in 0..n {
        let c = &u[e * np..(e + 1) * np];
        let xe = mesh.node(e);
        let dst = &mut out[e * np..(e + 1) * np];
        dst.iter_mut().for_each(|v| *v = 0.0);
        for q in 0..t.nodes.len() {
            let x = xe + (t.nodes[q] + 1.0) * h / 2.0;
            let uq: f64 = c.iter().zip(&t.p[q]).map(|(a, b)| a * b).sum();
            let ku = (problem.kappa)(x, tau) * uq;
            let r = (problem.rho)(x, tau) * h / 2.0;
            let w = t.weights[q];
            for m in 0..np {
                dst[m] += w * (ku * t.dp[q][m] + r * t.p[q][m]);
            }
        }
        for (m, v) in dst.iter_mut().enumerate() {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            *v = (2 * m + 1) as f64 / h * (*v - flux[e + 1] + sign * flux[e]);
        }
    }
}

/// Classical RK4 from the L² projection of the initial condition to `t_end`.
/// `cfl` defaults to [`default_cfl`].
pub fn dg_solve(
    problem: &TestProblem,
    mesh: Mesh,
    d: usize,
    t_end: f64,
    cfl: Option<f64>,
) -> Result<DGField, DgError> {
    Ok(dg_solve_series(problem, mesh, d, &[t_end], cfl)?
        .pop()
        .expect("one time"))
}

/// Fields at each requested time (any order; output follows input order),
/// from a single time march.
pub fn dg_solve_series(
    problem: &TestProblem,
    mesh: Mesh,
    d: usize,
    times: &[f64],
    cfl: Option<f64>,
) -> Result<Vec<DGField>, DgError> {
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(DgError::InvalidInput(format!(
            "final time {t} must be finite and ≥ 0"
        )));
    }
    let cfl = cfl.unwrap_or_else(|| default_cfl(d));
    if !(cfl > 0.0) {
        return Err(DgError::InvalidInput(format!("cfl {cfl} must be positive")));
    }
    let dt_max = if problem.max_speed > 0.0 {
        cfl * mesh.h() / problem.max_speed
    } else {
        cfl * mesh.h()
    };
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&i, &j| times[i].total_cmp(&times[j]));

    let tables = Tables::new(d);
    let mut field = super::l2_project(problem.initial_fn(), mesh, d);
    let mut u = std::mem::take(&mut field.coeffs);
    let len = u.len();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![0.0; len],
        vec![0.0; len],
        vec![0.0; len],
        vec![0.0; len],
        vec![0.0; len],
    );
    let mut now = 0.0;
    let mut results: Vec<Option<DGField>> = vec![None; times.len()];
    for &idx in &order {
        let target = times[idx];
        let span = target - now;
        if span > 0.0 {
            let steps = (span / dt_max).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            for s in 0..steps {
                let t0 = now + s as f64 * dt;
                rhs_into(&u, d, &mesh, t0, problem, &tables, &mut k1);
                axpy(&mut tmp, &u, dt / 2.0, &k1);
                rhs_into(&tmp, d, &mesh, t0 + dt / 2.0, problem, &tables, &mut k2);
                axpy(&mut tmp, &u, dt / 2.0, &k2);
                rhs_into(&tmp, d, &mesh, t0 + dt / 2.0, problem, &tables, &mut k3);
                axpy(&mut tmp, &u, dt, &k3);
                rhs_into(&tmp, d, &mesh, t0 + dt, problem, &tables, &mut k4);
                for i in 0..len {
                    u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
                if u.iter().any(|v| !(v.abs() <= 1e10)) {
                    return Err(DgError::UnstableBlowup { time: t0 + dt });
                }
            }
            now = target;
        }
        results[idx] = Some(DGField {
            d,
            mesh,
            coeffs: u.clone(),
            basis: ElementBasis::LegendreModal,
            time: target,
        });
    }
    Ok(results
        .into_iter()
        .map(|f| f.expect("every time visited"))
        .collect())
}

fn axpy(out: &mut [f64], u: &[f64], a: f64, k: &[f64]) {
    for ((o, x), y) in out.iter_mut().zip(u).zip(k) {
        *o = x + a * y;
    }
}

impl TestProblem {
    fn initial_fn(&self) -> impl Fn(f64) -> f64 + '_ {
        move |x| self.initial(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::{l2_project, ProblemId};
    use crate::quadrature::GaussLegendre;

    fn l2_error(f: &DGField, exact: impl Fn(f64) -> f64) -> f64 {
        let g = GaussLegendre::new(6);
        (0..f.mesh.n)
            .map(|e| {
                g.integrate(f.mesh.node(e), f.mesh.node(e + 1), |x| {
                    (f.eval_on(e, x) - exact(x)).powi(2)
                })
            })
            .sum::<f64>()
            .sqrt()
    }

    fn custom(
        kappa: fn(f64, f64) -> f64,
        rho: fn(f64, f64) -> f64,
        exact: fn(f64, f64) -> f64,
    ) -> TestProblem {
        TestProblem {
            name: "custom",
            a: 0.0,
            b: 1.0,
            boundary: Boundary::Periodic,
            kappa,
            rho,
            exact,
            max_speed: 1.0,
        }
    }

    #[test]
    fn constants_are_steady() {
        let p = custom(|_, _| 1.0, |_, _| 0.0, |_, _| 2.5);
        let mesh = Mesh::new(0.0, 1.0, 8).unwrap();
        let f = l2_project(|_| 2.5, mesh, 3);
        let r = dg_rhs(&f, 0.0, &p);
        assert!(r.iter().all(|v| v.abs() < 1e-12), "{r:?}");
        let out = dg_solve(&p, mesh, 3, 0.7, None).unwrap();
        for x in [0.0, 0.31, 0.9] {
            assert!((out.eval(x) - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_data_interior_derivative() {
        // u = x on a 3-element periodic mesh: away from the wrap, element 1 has
        // continuous traces, so du/dτ = −u_x = −1.
        let p = custom(|_, _| 1.0, |_, _| 0.0, |x, _| x);
        let mesh = Mesh::new(0.0, 3.0, 3).unwrap();
        let f = l2_project(|x| x, mesh, 1);
        let r = dg_rhs(&f, 0.0, &p);
        assert!((r[2] + 1.0).abs() < 1e-13, "{r:?}");
        assert!(r[3].abs() < 1e-13);
    }

    #[test]
    fn source_only_rhs_is_projection() {
        let p = custom(|_, _| 0.0, |_, _| 1.0, |_, _| 0.0);
        let mesh = Mesh::new(0.0, 1.0, 4).unwrap();
        let f = l2_project(|x| x.sin(), mesh, 2);
        let r = dg_rhs(&f, 0.0, &p);
        for e in 0..4 {
            assert!((r[e * 3] - 1.0).abs() < 1e-14);
            assert!(r[e * 3 + 1].abs() < 1e-14 && r[e * 3 + 2].abs() < 1e-14);
        }
    }

    #[test]
    fn zero_time_returns_projection() {
        let p = TestProblem::get(ProblemId::Tp1);
        let mesh = Mesh::for_problem(&p, 10).unwrap();
        let f = dg_solve(&p, mesh, 2, 0.0, None).unwrap();
        assert_eq!(f.coeffs, l2_project(|x| p.initial(x), mesh, 2).coeffs);
    }

    #[test]
    fn periodic_mass_is_conserved() {
        let p = TestProblem::get(ProblemId::Tp1);
        let mesh = Mesh::for_problem(&p, 16).unwrap();
        let f0 = l2_project(|x| p.initial(x) + 0.3 * (4.0 * x).cos(), mesh, 2);
        let mass0 = f0.integral();
        let f = dg_solve(&p, mesh, 2, 1.0, None).unwrap();
        // Initial data differs from p's, so compare with its own projection.
        let mass1 = f.integral();
        let expect = l2_project(|x| p.initial(x), mesh, 2).integral();
        assert!((mass1 - expect).abs() < 1e-10);
        assert!(mass0.is_finite());
    }

    #[test]
    fn tp1_converges_at_order_d_plus_one() {
        let p = TestProblem::get(ProblemId::Tp1);
        for d in 1..=2 {
            let errs: Vec<f64> = [20, 40, 80]
                .iter()
                .map(|&n| {
                    let f = dg_solve(&p, Mesh::for_problem(&p, n).unwrap(), d, 1.0, None).unwrap();
                    l2_error(&f, |x| (p.exact)(x, 1.0))
                })
                .collect();
            for w in errs.windows(2) {
                let rate = (w[0] / w[1]).log2();
                assert!(rate > d as f64 + 0.75, "d={d} rate={rate} errs={errs:?}");
            }
        }
    }

    #[test]
    fn tp2_and_tp3_converge() {
        for id in [ProblemId::Tp2, ProblemId::Tp3] {
            let p = TestProblem::get(id);
            let errs: Vec<f64> = [10, 20, 40]
                .iter()
                .map(|&n| {
                    let f = dg_solve(&p, Mesh::for_problem(&p, n).unwrap(), 1, 1.0, None).unwrap();
                    l2_error(&f, |x| (p.exact)(x, 1.0))
                })
                .collect();
            let rate = (errs[1] / errs[2]).log2();
            assert!(rate > 1.7, "{id} rate={rate} errs={errs:?}");
        }
    }

    #[test]
    fn series_matches_order_of_request() {
        let p = TestProblem::get(ProblemId::Tp1);
        let mesh = Mesh::for_problem(&p, 10).unwrap();
        let out = dg_solve_series(&p, mesh, 1, &[0.5, 0.0, 0.25], None).unwrap();
        assert_eq!(
            out.iter().map(|f| f.time).collect::<Vec<_>>(),
            vec![0.5, 0.0, 0.25]
        );
    }

    #[test]
    fn large_time_step_blows_up() {
        let p = TestProblem::get(ProblemId::Tp1);
        let mesh = Mesh::for_problem(&p, 40).unwrap();
        assert!(matches!(
            dg_solve(&p, mesh, 3, 20.0, Some(2.0)),
            Err(DgError::UnstableBlowup { .. })
        ));
    }

    #[test]
    fn rejects_negative_time() {
        let p = TestProblem::get(ProblemId::Tp1);
        let mesh = Mesh::for_problem(&p, 4).unwrap();
        assert!(matches!(
            dg_solve(&p, mesh, 1, -1.0, None),
            Err(DgError::InvalidInput(_))
        ));
    }
}
