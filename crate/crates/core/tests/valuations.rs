use std::f64::consts::{FRAC_1_SQRT_2, PI};

use minktensor::approx::default_bump;
use minktensor::geometry::{unit_cube, unit_square, Polytope};
use minktensor::spherical::{RegionBox, RegionSpec, RegionTerm, WeightFn};
use minktensor::tensor::{metric_power, Rotation, SymTensor, Vec3};
use minktensor::valuations::{evaluate, evaluate_with, smooth_cap_phitilde, w1, EdgeOrientation, FunctionalSpec};
use minktensor::verification::{random_polytope, random_region, random_weight, RandomBodySpec};
use minktensor::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spec(s: &str) -> FunctionalSpec {
    FunctionalSpec::parse(s).unwrap()
}

fn full(p: &Polytope, s: &str) -> SymTensor {
    evaluate(p, &spec(s), &RegionSpec::Full, &WeightFn::One).unwrap()
}

fn hull(dim: usize, n: usize, seed: u64) -> Polytope {
    random_polytope(&mut ChaCha8Rng::seed_from_u64(seed), &RandomBodySpec::hull(dim, n))
}

fn e(i: usize) -> Vec3 {
    let mut v = Vec3::zeros();
    v[i] = 1.0;
    v
}

#[test]
fn cube_intrinsic_volumes() {
    let c = unit_cube();
    for (k, v) in [(0, 1.0), (1, 3.0), (2, 3.0)] {
        let got = full(&c, &format!("Phi({k},0,0,0)")).as_scalar().unwrap();
        assert!((got - v).abs() <= 1e-9 * v, "k={k}: {got}");
    }
    for seed in 0..5 {
        let p = hull(3, 12, seed);
        assert!((full(&p, "Phi(0,0,0,0)").as_scalar().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn isolated_cube_edge() {
    let c = unit_cube();
    let region = RegionSpec::boxed(RegionBox::axis_aligned(&[0.2, -0.1, -0.1], &[0.8, 0.1, 0.1]));
    let t = evaluate(&c, &spec("PhiTilde3(0,0,0)"), &region, &WeightFn::One).unwrap();
    // the edge along e1 through the origin, with 0.6 of its length inside
    assert!((t.eval(&[e(0), e(1)]).unwrap() - 0.3).abs() < 1e-12);
    assert!((t.eval(&[e(0), e(2)]).unwrap() + 0.3).abs() < 1e-12);
    assert!(t.eval(&[e(1), e(2)]).unwrap().abs() < 1e-12);
}

#[test]
fn cube_edge_tensors_vanish() {
    let c = unit_cube();
    for r in 0..=3 {
        for s in 0..=3 {
            assert!(full(&c, &format!("PhiTilde3({r},{s},0)")).max_norm() < 1e-12, "r={r} s={s}");
        }
    }
}

#[test]
fn planar_examples() {
    let tri = Polytope::hull(2, &[Vec3::zeros(), e(0), e(1)]).unwrap();
    let t = full(&tri, "PhiTilde2(1,0,1)");
    assert!((t.eval(&[e(0), e(0)]).unwrap() + FRAC_1_SQRT_2).abs() < 1e-12);
    assert!((t.eval(&[e(1), e(1)]).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
    assert!(t.eval(&[e(0), e(1)]).unwrap().abs() < 1e-12);
    assert!(full(&unit_square(), "PhiTilde2(0,1,0)").max_norm() < 1e-12);
    assert!((full(&unit_square(), "GlobalPsi2Vol(0)").as_scalar().unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn planar_relations() {
    for seed in 0..5 {
        let p = hull(2, 9, seed);
        for r in 0..=4 {
            assert!(full(&p, &format!("GlobalPhiTilde2(1,{r},0)")).max_norm() < 1e-10);
        }
        let a = full(&p, "GlobalPhiTilde2(1,1,1)").scaled(2.0);
        let b = full(&p, "GlobalPhiTilde2(0,2,0)");
        assert!((&a + &b).max_norm() < 1e-9);
    }
}

#[test]
fn edge_totals_vanish() {
    let c = unit_cube();
    assert!(full(&c, "GlobalT3(0,0)").max_norm() < 1e-12);
    let p = hull(3, 20, 42);
    let d = p.diameter();
    assert!(full(&p, "GlobalT3(2,1)").max_norm() <= 1e-8 * d.powi(3));
    let q = p.translate(&Vec3::new(3.0, -2.0, 1.0));
    assert!(full(&q, "GlobalT3(2,1)").max_norm() <= 1e-8 * d.powi(3));
}

#[test]
fn w1_examples() {
    let c = unit_cube();
    assert!((w1(&c, &WeightFn::One).unwrap() - 6.0 * PI).abs() < 1e-12);
    // normals near e1+e2+e3 / sqrt 3 meet no edge cone of the cube
    let away = WeightFn::bump(Vec3::new(1.0, 1.0, 1.0).normalize(), 0.99, 0.995).unwrap();
    assert_eq!(w1(&c, &away).unwrap(), 0.0);
    let p = hull(3, 10, 1);
    let f = WeightFn::bump(e(2), -0.2, 0.3).unwrap();
    let ratio = w1(&p.scale(2.5).unwrap(), &f).unwrap() / w1(&p, &f).unwrap();
    assert!((ratio - 2.5).abs() < 1e-12);
}

#[test]
fn smooth_cap_examples() {
    let h = 0.5;
    assert!(smooth_cap_phitilde(h, 0, 0, &WeightFn::Zero).unwrap().is_zero());
    assert!(matches!(smooth_cap_phitilde(h, 0, 0, &WeightFn::One), Err(Error::SupportReachesRim { .. })));
    let f = default_bump(h).unwrap();
    for (r, s) in [(0, 0), (1, 1), (0, 2)] {
        let t = smooth_cap_phitilde(h, r, s, &f).unwrap();
        let rot = Rotation::about_axis(&Vec3::z(), 0.7);
        assert!(t.rotate(&rot).unwrap().max_abs_diff(&t) <= 1e-8 * t.max_norm().max(1.0));
    }
}

#[test]
fn locality_on_untouched_edge() {
    let c = unit_cube();
    let cut = c.clip_halfspace(&Vec3::new(1.0, 1.0, 1.0).normalize(), 2.5 / 3f64.sqrt()).unwrap();
    assert!(cut.num_faces(0) > c.num_faces(0));
    let region = RegionSpec::Union(vec![RegionTerm {
        bbox: Some(RegionBox::axis_aligned(&[-0.1, -0.1, -0.1], &[0.5, 0.1, 0.1])),
        cap: None,
    }]);
    for s in ["PhiTilde3(1,1,0)", "Phi(1,1,1,1)", "Phi(0,0,2,0)", "Phi(2,2,0,0)"] {
        let a = evaluate(&c, &spec(s), &region, &WeightFn::One).unwrap();
        let b = evaluate(&cut, &spec(s), &region, &WeightFn::One).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-10 * a.max_norm().max(1.0), "{s}");
        assert_eq!(evaluate(&c, &spec(s), &region, &WeightFn::One).unwrap(), a);
    }
}

#[test]
fn invalid_indices_are_reported() {
    let c = unit_cube();
    for s in ["Phi(3,0,0,0)", "Phi(0,0,0,1)", "PhiTilde2(1,0,0)", "GlobalPsi2Vol(1)"] {
        let err = evaluate(&c, &spec(s), &RegionSpec::Full, &WeightFn::One).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(_) | Error::DimensionMismatch { .. }), "{s}: {err}");
    }
    let box_region = RegionSpec::boxed(RegionBox::around(3, &Vec3::zeros(), 1.0));
    assert!(evaluate(&c, &spec("GlobalT3(0,0)"), &box_region, &WeightFn::One).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn metric_factor_is_exact(seed in any::<u64>(), idx in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polytope(&mut rng, &RandomBodySpec::hull(3, 8));
        let region = random_region(&mut rng, &p);
        let weight = random_weight(&mut rng, 3);
        let base = ["Phi(1,1,0,1)", "PhiTilde3(0,1,0)", "Phi(2,0,1,0)", "W1"][idx];
        let plain = evaluate(&p, &spec(base), &region, &weight).unwrap();
        let with_q = evaluate(&p, &spec(&format!("Q^2*{base}")), &region, &weight).unwrap();
        prop_assert_eq!(with_q, metric_power(3, 2).product(&plain).unwrap());
    }

    #[test]
    fn edge_direction_choice_is_irrelevant(seed in any::<u64>(), r in 0usize..=2, s in 0usize..=2, j in 0usize..=1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polytope(&mut rng, &RandomBodySpec::hull(3, 10));
        let region = random_region(&mut rng, &p);
        let weight = random_weight(&mut rng, 3);
        let f = spec(&format!("PhiTilde3({r},{s},{j})"));
        let mask: Vec<bool> = (0..p.num_faces(1)).map(|i| (seed >> (i % 64)) & 1 == 1).collect();
        let a = evaluate(&p, &f, &region, &weight).unwrap();
        prop_assert_eq!(&evaluate_with(&p, &f, &region, &weight, &EdgeOrientation::Flips(mask)).unwrap(), &a);
        prop_assert_eq!(&evaluate_with(&p, &f, &region, &weight, &EdgeOrientation::Reversed).unwrap(), &a);
    }

    #[test]
    fn reflections_flip_tilde_tensors(seed in any::<u64>(), r in 0usize..=2, s in 0usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polytope(&mut rng, &RandomBodySpec::hull(3, 9));
        let rot = Rotation::random_improper(3, &mut rng);
        let f = spec(&format!("PhiTilde3({r},{s},0)"));
        let weight = random_weight(&mut rng, 3);
        let a = evaluate(&p, &f, &RegionSpec::Full, &weight).unwrap();
        let b = evaluate(&p.apply_rotation(&rot).unwrap(), &f, &RegionSpec::Full, &weight.rotated(&rot)).unwrap();
        let expect = a.rotate(&rot).unwrap().scaled(-1.0);
        prop_assert!(b.max_abs_diff(&expect) <= 1e-9 * expect.max_norm().max(1.0));
    }

    #[test]
    fn homogeneous_under_scaling(seed in any::<u64>(), lambda in 0.3..3.0f64, k in 0usize..=2, r in 0usize..=2) {
        let p = hull(3, 9, seed);
        let f = spec(&format!("Phi({k},{r},1,0)"));
        let a = full(&p, &format!("Phi({k},{r},1,0)"));
        let b = evaluate(&p.scale(lambda).unwrap(), &f, &RegionSpec::Full, &WeightFn::One).unwrap();
        let expect = a.scaled(lambda.powi((k + r) as i32));
        prop_assert!(b.max_abs_diff(&expect) <= 1e-9 * expect.max_norm().max(1.0));
    }
}
