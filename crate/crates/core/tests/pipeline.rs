use psiac::dg::{dg_solve, l2_project, Mesh, ProblemId, TestProblem};
use psiac::filters::{build_spec, Family, Side};
use psiac::psiac::{
    filter_boundary, filter_boundary_derivative, reference_convolve, BlendedEvaluator,
    ConvolutionKernel, PsiacError, SymmetricFilter,
};

#[test]
fn filtered_output_beats_raw_dg_near_the_boundary() {
    let p = TestProblem::get(ProblemId::Tp1);
    let field = dg_solve(&p, Mesh::for_problem(&p, 40).unwrap(), 2, 0.5, None).unwrap();
    let exact = |x: f64| (p.exact)(x, 0.5);
    for fam in [Family::Srv, Family::Rlkv, Family::Np(0)] {
        for side in [Side::Left, Side::Right] {
            let poly = filter_boundary(&field, &build_spec(fam, 2, side).unwrap()).unwrap();
            let (lo, hi) = poly.region;
            let (mut raw, mut filtered) = (0.0f64, 0.0f64);
            for i in 0..=60 {
                let x = lo + (hi - lo) * i as f64 / 60.0;
                raw = raw.max((field.eval(x) - exact(x)).abs());
                filtered = filtered.max((poly.eval(x) - exact(x)).abs());
            }
            assert!(
                filtered < raw / 10.0,
                "{fam} {side:?}: {filtered:e} vs raw {raw:e}"
            );
        }
    }
}

#[test]
fn blended_output_is_continuous_across_every_handover() {
    let p = TestProblem::get(ProblemId::Tp3);
    let field = dg_solve(&p, Mesh::for_problem(&p, 40).unwrap(), 1, 1.0, None).unwrap();
    let sym =
        SymmetricFilter::from_spec(&build_spec(Family::Symmetric, 1, Side::Interior).unwrap())
            .unwrap();
    let left = filter_boundary(&field, &build_spec(Family::Np(0), 1, Side::Left).unwrap()).unwrap();
    let right =
        filter_boundary(&field, &build_spec(Family::Np(0), 1, Side::Right).unwrap()).unwrap();
    let ev = BlendedEvaluator::new(&field, left, right, &sym, Some(2)).unwrap();
    let (l_end, r_start) = ev.boundary_extent();
    let h = field.mesh.h();
    for x in [ev.left.region.1, l_end, r_start, ev.right.region.0] {
        let jump = (ev.eval(x + 1e-9 * h).unwrap() - ev.eval(x - 1e-9 * h).unwrap()).abs();
        assert!(jump < 1e-8, "jump {jump:e} at {x}");
    }
}

#[test]
fn reference_convolution_matches_the_polynomial_on_a_dirichlet_run() {
    let p = TestProblem::get(ProblemId::Tp2);
    let field = dg_solve(&p, Mesh::for_problem(&p, 30).unwrap(), 1, 2.0, None).unwrap();
    let spec = build_spec(Family::Srv, 1, Side::Right).unwrap();
    let poly = filter_boundary(&field, &spec).unwrap();
    let (lo, hi) = poly.region;
    for i in 0..=7 {
        let x = lo + (hi - lo) * i as f64 / 7.0;
        let k = ConvolutionKernel::boundary_at(&spec, &field, x).unwrap();
        let r = reference_convolve(&k, &field, x).unwrap();
        assert!((r - poly.eval(x)).abs() < 1e-11);
    }
}

#[test]
fn derivative_of_the_filtered_polynomial() {
    let mesh = Mesh::new(0.0, 1.0, 30).unwrap();
    let field = l2_project(|x| (2.0 * x).exp(), mesh, 2);
    let spec = build_spec(Family::Np(0), 2, Side::Left).unwrap();
    let d1 = filter_boundary_derivative(&field, &spec, 1).unwrap();
    let (lo, hi) = d1.region;
    for i in 0..=5 {
        let x = lo + (hi - lo) * i as f64 / 5.0;
        assert!((d1.eval(x) - 2.0 * (2.0 * x).exp()).abs() < 1e-5);
    }
}

#[test]
fn errors_surface_as_values() {
    let coarse = l2_project(|x| x, Mesh::new(0.0, 1.0, 4).unwrap(), 1);
    let spec = build_spec(Family::Srv, 1, Side::Left).unwrap();
    assert!(matches!(
        filter_boundary(&coarse, &spec),
        Err(PsiacError::MeshTooCoarse { .. })
    ));
    let other_degree = l2_project(|x| x, Mesh::new(0.0, 1.0, 40).unwrap(), 2);
    let sym =
        SymmetricFilter::from_spec(&build_spec(Family::Symmetric, 2, Side::Interior).unwrap())
            .unwrap();
    assert!(matches!(
        sym.eval(&other_degree, 0.01),
        Err(PsiacError::OutsideInteriorRegion { .. })
    ));
    assert!(SymmetricFilter::from_spec(&spec).is_err());
}
