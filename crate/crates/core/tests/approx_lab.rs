use minktensor::approx::{
    build_pnht, check_assumptions, convergence_experiment, default_bump, ell, find_parameters, hausdorff_to_cap,
    omega_threshold, predict_f, ApproxParams, Approximant, Experiment,
};
use minktensor::spherical::WeightFn;
use minktensor::tensor::{Rotation, Vec3};
use minktensor::valuations::FunctionalSpec;
use proptest::prelude::*;

#[test]
fn hausdorff_distance_shrinks() {
    let h = 0.5;
    let d: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&t| hausdorff_to_cap(&build_pnht(&ApproxParams::new(2, h, t).unwrap()).unwrap(), h, 4000))
        .collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    assert!(d[2] < 0.01);
}

#[test]
fn quarter_turn_symmetry() {
    for t in [0.2, 0.1] {
        let params = ApproxParams::new(2, 0.5, t).unwrap();
        let p = build_pnht(&params).unwrap();
        let q = p.apply_rotation(&params.theta()).unwrap();
        assert!(p.approx_same(&q, 1e-9));
        let rot = Rotation::about_axis(&Vec3::z(), std::f64::consts::FRAC_PI_2);
        assert!(p.approx_same(&p.apply_rotation(&rot).unwrap(), 1e-9));
    }
}

#[test]
fn touched_edges_are_lattice_edges() {
    let params = ApproxParams::new(2, 0.5, 0.1).unwrap();
    let approx = Approximant::build(&params).unwrap();
    let f = default_bump(0.5).unwrap();
    let touched = approx.touched_edges(&f);
    assert!(!touched.is_empty());
    for &i in &touched {
        let r = approx.classes[i].expect("classified");
        let v = approx.polytope.edge_vector(i);
        let flat = Vec3::new(v.x, v.y, 0.0).normalize();
        assert!(flat.cross(&ell(2, r)).norm() < 1e-9);
        let vf = approx.canonical_edge_vector(i).unwrap();
        assert!(vf.dot(&ell(2, r)) > 0.0);
    }
}

#[test]
fn assumption_examples() {
    let steep = Approximant::build(&ApproxParams::new(2, 2.0, 0.2).unwrap()).unwrap();
    let rep = check_assumptions(&steep, &default_bump(2.0).unwrap(), 0.1);
    assert!(!rep.a && rep.height_margin < 0.0);
    let approx = Approximant::build(&ApproxParams::new(2, 0.5, 0.1).unwrap()).unwrap();
    assert!(check_assumptions(&approx, &default_bump(0.5).unwrap(), 2.0).all());
    let search = find_parameters(2, 0.2, 1.0, 0.2, 24).unwrap();
    assert!(search.found);
    let (p, rep) = search.last().unwrap();
    assert!(rep.all() && p.h < 1.0);
}

#[test]
fn edge_vectors_point_along_classes_in_passing_regime() {
    let search = find_parameters(2, 0.3, 0.5, 0.1, 24).unwrap();
    let (params, rep) = search.last().unwrap();
    assert!(rep.all());
    let approx = Approximant::build(params).unwrap();
    let f = default_bump(params.h).unwrap();
    for i in approx.touched_edges(&f) {
        let r = approx.classes[i].unwrap();
        let vf = approx.canonical_edge_vector(i).unwrap();
        assert!((vf - ell(2, r)).norm() <= rep.eps);
    }
}

#[test]
fn width_floor_along_ladder() {
    let f = default_bump(0.5).unwrap();
    for t in [0.2, 0.1, 0.05] {
        let p = build_pnht(&ApproxParams::new(2, 0.5, t).unwrap()).unwrap();
        let w = minktensor::valuations::w1(&p, &f).unwrap() / 2.0;
        assert!(w > 0.8, "t={t}: {w}");
    }
}

#[test]
fn curvature_tensor_converges() {
    let mut exp = Experiment::new(FunctionalSpec::parse("Phi(1,0,0,0)").unwrap(), 0.5, default_bump(0.5).unwrap());
    exp.ts = vec![0.2, 0.1, 0.05, 0.025];
    let table = convergence_experiment(&exp).unwrap();
    let diffs: Vec<f64> = table.rows.iter().filter_map(|r| r.difference).map(f64::abs).collect();
    assert!(diffs.windows(2).all(|w| w[1] < w[0]), "{diffs:?}");
}

#[test]
fn predicted_frame_dependence() {
    assert!((predict_f(1, 0.0, &[(2, 1.0)], 2).unwrap() - 1.0).abs() < 1e-15);
    assert!((predict_f(1, 1.0, &[(2, 1.0)], 2).unwrap() - 1.0).abs() < 1e-15);
    assert!(predict_f(2, 0.0, &[(0, 0.7), (1, -1.3)], 2).unwrap().abs() < 1e-15);
    assert!(predict_f(1, 1.5, &[(1, 1.0)], 2).is_err());
    assert!(predict_f(1, -0.1, &[(1, 1.0)], 2).is_err());
    // d = 2, N = 2: leading term 2 c lambda^4 makes F1 non-constant
    let a = predict_f(1, 0.3, &[(2, 1.0)], 2).unwrap();
    let b = predict_f(1, 0.7, &[(2, 1.0)], 2).unwrap();
    assert!((a - b).abs() > 0.1);
}

#[test]
fn bad_parameters_rejected() {
    assert!(ApproxParams::new(4, 0.5, 0.1).is_err());
    assert!(ApproxParams::new(2, -0.5, 0.1).is_err());
    assert!(ApproxParams::new(2, 0.25, 0.6).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bump_is_axially_symmetric(h in 0.2..2.0f64, angle in 0.0..6.3f64, x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64) {
        let u = Vec3::new(x, y, z);
        prop_assume!(u.norm() > 0.1);
        let u = u.normalize();
        let f = default_bump(h).unwrap();
        let v = f.eval(&u);
        prop_assert!((0.0..=1.0).contains(&v));
        let rot = Rotation::about_axis(&Vec3::z(), angle);
        prop_assert!((f.eval(&rot.apply(&u)) - v).abs() <= 1e-12);
        if v > 0.0 {
            prop_assert!(u.dot(&-Vec3::z()) > omega_threshold(h));
        }
    }

    #[test]
    fn bump_is_not_identically_zero(h in 0.2..2.0f64) {
        let f = default_bump(h).unwrap();
        prop_assert_eq!(f.eval(&-Vec3::z()), 1.0);
        prop_assert!(!matches!(f, WeightFn::Zero));
    }
}
