mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use minktensor::approx::{convergence_experiment, default_bump, tilted_bump, ConvergenceTable, Experiment};
use minktensor::geometry::{unit_cube, Arc};
use minktensor::spherical::{arc_moment_closed, arc_moment_gl, Extra, RegionSpec, WeightFn};
use minktensor::tensor::{sym_product, Rotation, Vec3};
use minktensor::valuations::{evaluate, smooth_cap_phitilde, FunctionalSpec};
use minktensor::verification::{run_suite, SuiteConfig, SuiteReport, DISCREPANCY_FLOOR};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INTRINSIC_RTOL: f64 = 1e-9;
const SMOOTH_LIMIT_RTOL: f64 = 0.02;
const PERSIST_FACTOR: f64 = 0.25;
const ARC_TOL: f64 = 1e-11;
const PRODUCT_TOL: f64 = 1e-12;
const H: f64 = 0.5;
const LADDER: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn suites(names: &[&str]) -> Outcome {
    let cfg = SuiteConfig::default();
    let reports: Vec<SuiteReport> = names.iter().map(|n| run_suite(n, &cfg).expect("known suite")).collect();
    let mut detail: Vec<String> = reports
        .iter()
        .map(|r| format!("{} {}/{} checks failed, worst {:.2e}", r.name, r.failures.len(), r.checks, r.worst))
        .collect();
    for r in &reports {
        detail.extend(r.failures.iter().take(3).map(|f| format!("  case {} {}: {}", f.case, f.check, f.detail)));
        detail.extend(r.notes.iter().map(|n| format!("  {n}")));
    }
    Outcome { pass: reports.iter().all(|r| r.passed() && r.cases == cfg.cases), detail: detail.join("; ") }
}

fn c1() -> Outcome {
    let c = unit_cube();
    let mut pass = true;
    let mut got = Vec::new();
    for (k, expect) in [(0, 1.0), (1, 3.0), (2, 3.0)] {
        let spec = FunctionalSpec::parse(&format!("Phi({k},0,0,0)")).unwrap();
        let v = evaluate(&c, &spec, &RegionSpec::Full, &WeightFn::One).unwrap().as_scalar().unwrap();
        pass &= (v - expect).abs() <= INTRINSIC_RTOL * expect;
        got.push(format!("{v:.12}"));
    }
    Outcome { pass, detail: format!("V0..V2 = ({}), rtol {INTRINSIC_RTOL:e}", got.join(", ")) }
}

fn c2() -> Outcome {
    suites(&["edge-total"])
}

fn c3() -> Outcome {
    suites(&["planar-basis"])
}

fn c4() -> Outcome {
    suites(&["covariance"])
}

fn table(spec: &str, weight: &WeightFn) -> ConvergenceTable {
    let mut exp = Experiment::new(FunctionalSpec::parse(spec).unwrap(), H, weight.clone());
    exp.ts = LADDER.to_vec();
    convergence_experiment(&exp).unwrap()
}

fn c5() -> Outcome {
    let f = tilted_bump(H, 0.2).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for s in 0..=2 {
        let spec = format!("PhiTilde3(0,{s},0)");
        let lim = table(&spec, &f).limit_tensor.unwrap();
        let smooth = smooth_cap_phitilde(H, 0, s, &f).unwrap();
        let rel = lim.max_abs_diff(&smooth) / smooth.max_norm();
        pass &= smooth.max_norm() > 0.0 && rel <= SMOOTH_LIMIT_RTOL;
        detail.push(format!("s={s} rel {rel:.2e}"));
    }
    Outcome { pass, detail: format!("{} (bound {SMOOTH_LIMIT_RTOL})", detail.join(", ")) }
}

fn c6() -> Outcome {
    let f = default_bump(H).unwrap();
    let bad = table("PhiTilde3(0,0,1)", &f);
    let (lo, hi) = (bad.min_discrepancy(), bad.max_discrepancy());
    let mut pass = hi > 0.0 && lo >= PERSIST_FACTOR * hi;
    let mut detail = vec![format!("PhiTilde3(0,0,1) |D| in [{lo:.4e}, {hi:.4e}]")];
    for spec in ["Phi(1,0,0,1)", "Phi(1,0,2,0)", "PhiTilde3(0,0,0)", "Phi(1,4,0,0)"] {
        let t = table(spec, &f);
        let (fine, coarse) = t.discrepancy_ends().unwrap();
        let scale = t.rows.iter().map(|r| r.value.abs()).fold(1.0, f64::max);
        let decays = fine <= PERSIST_FACTOR * coarse || fine <= DISCREPANCY_FLOOR * scale;
        pass &= decays;
        detail.push(format!("{spec} |D| {coarse:.2e} -> {fine:.2e}"));
    }
    let floor = bad.w1_floor();
    pass &= floor > 0.0;
    detail.push(format!("min W1/N {floor:.4}"));
    Outcome { pass, detail: detail.join(", ") }
}

fn c7() -> Outcome {
    suites(&["valuation", "translation", "homogeneity", "locality", "vsign"])
}

fn c8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut arc_worst: f64 = 0.0;
    for dim in [2, 3] {
        for _ in 0..25 {
            let angle = rng.gen_range(0.01..PI - 0.01);
            let arc = if dim == 3 {
                let rot = Rotation::random_proper(3, &mut rng);
                Arc { start: rot.column(0), ortho: rot.column(1), angle }
            } else {
                let a: f64 = rng.gen_range(0.0..2.0 * PI);
                Arc { start: Vec3::new(a.cos(), a.sin(), 0.0), ortho: Vec3::new(-a.sin(), a.cos(), 0.0), angle }
            };
            let v = Rotation::random_proper(3, &mut rng).column(2);
            let extras = if dim == 3 { [Extra::None, Extra::Cross(v)] } else { [Extra::None, Extra::Ubar] };
            for extra in &extras {
                for s in 0..=6 {
                    let a = arc_moment_closed(dim, &arc, s, extra, 0.0, angle);
                    let b = arc_moment_gl(dim, &arc, s, extra, &WeightFn::One, 0.0, angle, 64);
                    arc_worst = arc_worst.max(a.max_abs_diff(&b));
                }
            }
        }
    }
    let mut prod_worst: f64 = 0.0;
    let mut seed = 0;
    for n in [2, 3] {
        for p in 0..=5 {
            for q in 0..=5 - p {
                seed += 1;
                let a = common::random_tensor(n, p, seed);
                let b = common::random_tensor(n, q, seed + 500);
                let fast = sym_product(&a, &b).unwrap();
                let slow = common::permutation_product(&a, &b);
                prod_worst = prod_worst.max(fast.max_abs_diff(&slow) / fast.max_norm().max(1.0));
            }
        }
    }
    Outcome {
        pass: arc_worst <= ARC_TOL && prod_worst <= PRODUCT_TOL,
        detail: format!("arc s<=6 worst {arc_worst:.2e} (tol {ARC_TOL:e}), product rank<=5 worst {prod_worst:.2e} (tol {PRODUCT_TOL:e})"),
    }
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Criterion; 8] = [("C1", c1), ("C2", c2), ("C3", c3), ("C4", c4), ("C5", c5), ("C6", c6), ("C7", c7), ("C8", c8)];
    let mut failed = 0;
    for (id, run) in criteria {
        let t0 = Instant::now();
        let out = run();
        let secs = t0.elapsed().as_secs_f64();
        println!("{id} {} [{secs:.1}s] {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        if !out.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
