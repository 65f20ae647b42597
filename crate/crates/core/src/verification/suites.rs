use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use super::random::{case_rng, random_polytope, random_region, random_spec, random_weight, BodyKind};
use super::{scaled_error, RandomBodySpec, SpecFamily, SuiteConfig, SuiteReport};
use crate::approx::{
    build_pnht, convergence_experiment, default_bump, hausdorff_to_cap, tilted_bump, ApproxParams, Experiment,
};
use crate::error::Result;
use crate::geometry::Polytope;
use crate::spherical::{RegionBox, RegionSpec, RegionTerm, WeightFn};
use crate::tensor::{multi_indices, multinomial, vector_power, Rotation, SymTensor, Vec3};
use crate::valuations::{evaluate, evaluate_with, smooth_cap_phitilde, EdgeOrientation, Functional, FunctionalSpec};

pub const LOCALITY_RTOL: f64 = 1e-10;
/// Rotation discrepancies below this (relative to `max(1, |v|)`) count as
/// zero; rank-2 functionals on the quarter-turn symmetric caps have no
/// discrepancy at all.
pub const DISCREPANCY_FLOOR: f64 = 1e-12;
pub const SMOOTH_LIMIT_RTOL: f64 = 0.02;
pub const DECAY_FACTOR: f64 = 0.25;

fn cases<F>(name: &str, cfg: &SuiteConfig, f: F) -> SuiteReport
where
    F: Fn(usize) -> SuiteReport + Sync + Send,
{
    let parts: Vec<SuiteReport> = if cfg.serial {
        (0..cfg.cases).map(&f).collect()
    } else {
        (0..cfg.cases).into_par_iter().map(&f).collect()
    };
    let mut out = SuiteReport::new(name);
    out.cases = cfg.cases;
    for p in parts {
        out.merge(p);
    }
    out
}

fn compare(rep: &mut SuiteReport, case: usize, what: String, a: &SymTensor, b: &SymTensor, rtol: f64) {
    if a.rank() != b.rank() {
        rep.fail(case, what, format!("rank {} vs {}", a.rank(), b.rank()));
        return;
    }
    let (err, scale) = scaled_error(a, b);
    rep.check(case, what, err, rtol * scale);
}

fn record<T>(rep: &mut SuiteReport, case: usize, what: &str, r: Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            rep.fail(case, what.to_string(), e.to_string());
            None
        }
    }
}

/// A random functional with a region and weight it accepts.
fn draw<R: Rng>(rng: &mut R, p: &Polytope, family: SpecFamily) -> (FunctionalSpec, RegionSpec, WeightFn) {
    let global = rng.gen_bool(0.2);
    let spec = random_spec(rng, p.dim(), family, 6, global);
    if global {
        (spec, RegionSpec::Full, WeightFn::One)
    } else {
        (spec, random_region(rng, p), random_weight(rng, p.dim()))
    }
}

fn dim_for(case: usize) -> usize {
    if case.is_multiple_of(2) {
        3
    } else {
        2
    }
}

/// `val(theta P, theta eta) = +- theta val(P, eta)` for proper and improper
/// `theta`, with the sign flipped for orientation-sensitive functionals.
pub fn run_covariance_suite(cfg: &SuiteConfig) -> SuiteReport {
    cases("covariance", cfg, |case| {
        let mut rng = case_rng(cfg.seed, 1, case);
        let mut rep = SuiteReport::new("covariance");
        let dim = dim_for(case);
        let spec_p = RandomBodySpec::pick(&mut rng, dim);
        let p = random_polytope(&mut rng, &spec_p);
        for family in [SpecFamily::Even, SpecFamily::Tilde] {
            let (spec, region, weight) = draw(&mut rng, &p, family);
            let base = match record(&mut rep, case, "evaluate", evaluate(&p, &spec, &region, &weight)) {
                Some(v) => v,
                None => continue,
            };
            for proper in [true, false] {
                let rot = if proper { Rotation::random_proper(dim, &mut rng) } else { Rotation::random_improper(dim, &mut rng) };
                let sign = if !proper && spec.is_tilde() { -1.0 } else { 1.0 };
                let kind = if proper { "proper" } else { "improper" };
                let moved = p.apply_rotation(&rot).and_then(|q| evaluate(&q, &spec, &region.rotated(&rot), &weight.rotated(&rot)));
                let expect = base.rotate(&rot).map(|t| t.scaled(sign));
                if let (Some(a), Some(b)) = (record(&mut rep, case, kind, moved), record(&mut rep, case, kind, expect)) {
                    compare(&mut rep, case, format!("{kind} {spec}"), &a, &b, cfg.rtol);
                }
            }
        }
        rep
    })
}

/// `val(K) + val(M) = val(K cup M) + val(K cap M)` for two overlapping slabs
/// `K`, `M` of `P` with `K cup M = P`.
pub fn run_valuation_suite(cfg: &SuiteConfig) -> SuiteReport {
    cases("valuation", cfg, |case| {
        let mut rng = case_rng(cfg.seed, 2, case);
        let mut rep = SuiteReport::new("valuation");
        let dim = dim_for(case);
        let spec_p = RandomBodySpec::pick(&mut rng, dim);
        let p = random_polytope(&mut rng, &spec_p);
        let w = loop {
            let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), if dim == 3 { rng.gen_range(-1.0..1.0) } else { 0.0 });
            if v.norm() > 0.1 {
                break v.normalize();
            }
        };
        let (lo, hi) = (-p.support(&-w), p.support(&w));
        let c = lo + rng.gen_range(0.3..0.7) * (hi - lo);
        let d = rng.gen_range(0.02..0.15) * (hi - lo);
        let parts = p.clip_halfspace(&w, c + d).and_then(|k| {
            let m = p.clip_halfspace(&-w, -(c - d))?;
            let km = k.clip_halfspace(&-w, -(c - d))?;
            Ok((k, m, km))
        });
        let (k, m, km) = match record(&mut rep, case, "split", parts) {
            Some(x) => x,
            None => return rep,
        };
        for family in [SpecFamily::Even, SpecFamily::Tilde] {
            let (spec, _, weight) = draw(&mut rng, &p, family);
            let full = RegionSpec::Full;
            let vals: Result<Vec<SymTensor>> = [&k, &m, &p, &km].iter().map(|q| evaluate(q, &spec, &full, &weight)).collect();
            if let Some(v) = record(&mut rep, case, "evaluate", vals) {
                compare(&mut rep, case, format!("additivity {spec}"), &(&v[0] + &v[1]), &(&v[2] + &v[3]), cfg.rtol);
            }
        }
        rep
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Expansion of `val(P + t, eta + t)` in powers of `t`.
pub fn translation_expansion(p: &Polytope, spec: &FunctionalSpec, region: &RegionSpec, weight: &WeightFn, t: &Vec3) -> Result<SymTensor> {
    let r = match spec.r() {
        Some(r) => r,
        None => return evaluate(p, spec, region, weight),
    };
    let mut out = SymTensor::zeros(p.dim(), spec.rank());
    for i in 0..=r {
        let coef = match spec.kind {
            Functional::Phi { .. } => 1.0 / factorial(i),
            _ => binomial(r, i),
        };
        let lower = evaluate(p, &spec.with_r(r - i), region, weight)?;
        out.axpy(coef, &lower.product(&vector_power(p.dim(), t, i))?);
    }
    Ok(out)
}

pub fn run_translation_suite(cfg: &SuiteConfig) -> SuiteReport {
    cases("translation", cfg, |case| {
        let mut rng = case_rng(cfg.seed, 3, case);
        let mut rep = SuiteReport::new("translation");
        let dim = dim_for(case);
        let spec_p = RandomBodySpec::pick(&mut rng, dim);
        let p = random_polytope(&mut rng, &spec_p);
        for family in [SpecFamily::Even, SpecFamily::Tilde] {
            let (spec, region, weight) = draw(&mut rng, &p, family);
            let mut t = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if dim == 2 {
                t.z = 0.0;
            }
            let lhs = evaluate(&p.translate(&t), &spec, &region.translated(&t), &weight);
            let rhs = translation_expansion(&p, &spec, &region, &weight, &t);
            if let (Some(a), Some(b)) = (record(&mut rep, case, "lhs", lhs), record(&mut rep, case, "rhs", rhs)) {
                compare(&mut rep, case, format!("translate {spec}"), &a, &b, cfg.rtol);
            }
        }
        rep
    })
}

pub fn run_homogeneity_suite(cfg: &SuiteConfig) -> SuiteReport {
    cases("homogeneity", cfg, |case| {
        let mut rng = case_rng(cfg.seed, 4, case);
        let mut rep = SuiteReport::new("homogeneity");
        let dim = dim_for(case);
        let spec_p = RandomBodySpec::pick(&mut rng, dim);
        let p = random_polytope(&mut rng, &spec_p);
        for family in [SpecFamily::Even, SpecFamily::Tilde] {
            let (spec, region, weight) = draw(&mut rng, &p, family);
            let lambda = rng.gen_range(0.3..3.0);
            let lhs = p.scale(lambda).and_then(|q| evaluate(&q, &spec, &region.scaled(lambda), &weight));
            let rhs = evaluate(&p, &spec, &region, &weight).map(|v| v.scaled(lambda.powi(spec.homogeneity() as i32)));
            if let (Some(a), Some(b)) = (record(&mut rep, case, "lhs", lhs), record(&mut rep, case, "rhs", rhs)) {
                compare(&mut rep, case, format!("scale {spec}"), &a, &b, cfg.rtol);
            }
        }
        rep
    })
}

/// `P` and `P' = P cap H` agree near a vertex far from `H`; a region inside
/// that neighbourhood sees the same support elements on both.
pub fn run_locality_suite(cfg: &SuiteConfig) -> SuiteReport {
    cases("locality", cfg, |case| {
        let mut rng = case_rng(cfg.seed, 5, case);
        let mut rep = SuiteReport::new("locality");
        let dim = dim_for(case);
        let spec_p = RandomBodySpec::pick(&mut rng, dim);
        let p = random_polytope(&mut rng, &spec_p);
        let v = p.vertices()[rng.gen_range(0..p.vertices().len())];
        let far = *p.vertices().iter().max_by(|a, b| (*a - v).norm().total_cmp(&(*b - v).norm())).expect("vertices");
        let w = (far - v).normalize();
        let gap = w.dot(&(far - v));
        let c = w.dot(&v) + rng.gen_range(0.5..0.8) * gap;
        let q = match record(&mut rep, case, "clip", p.clip_halfspace(&w, c)) {
            Some(q) => q,
            None => return rep,
        };
        let half = rng.gen_range(0.2..0.45) * (c - w.dot(&v)) / (dim as f64).sqrt();
        for family in [SpecFamily::Even, SpecFamily::Tilde] {
            let spec = random_spec(&mut rng, dim, family, 6, false);
            let weight = random_weight(&mut rng, dim);
            let cap = match random_region(&mut rng, &p) {
                RegionSpec::Union(ts) => ts.into_iter().find_map(|t| t.cap),
                RegionSpec::Full => None,
            };
            let region = RegionSpec::Union(vec![RegionTerm { bbox: Some(RegionBox::around(dim, &v, half)), cap }]);
            let a = evaluate(&p, &spec, &region, &weight);
            let b = evaluate(&q, &spec, &region, &weight);
            if let (Some(a), Some(b)) = (record(&mut rep, case, "P", a), record(&mut rep, case, "P'", b)) {
                compare(&mut rep, case, format!("local {spec}"), &a, &b, LOCALITY_RTOL);
            }
        }
        rep
    })
}

/// Edge direction signs do not change the edge functionals, bit for bit.
pub fn run_vsign_suite(cfg: &SuiteConfig) -> SuiteReport {
    cases("vsign", cfg, |case| {
        let mut rng = case_rng(cfg.seed, 6, case);
        let mut rep = SuiteReport::new("vsign");
        let spec_p = RandomBodySpec::pick(&mut rng, 3);
        let p = random_polytope(&mut rng, &spec_p);
        let (spec, region, weight) = draw(&mut rng, &p, SpecFamily::Tilde);
        let mask: Vec<bool> = (0..p.num_faces(1)).map(|_| rng.gen_bool(0.5)).collect();
        let base = evaluate(&p, &spec, &region, &weight);
        let flipped = evaluate_with(&p, &spec, &region, &weight, &EdgeOrientation::Flips(mask));
        let reversed = evaluate_with(&p, &spec, &region, &weight, &EdgeOrientation::Reversed);
        if let (Some(a), Some(b), Some(c)) = (
            record(&mut rep, case, "base", base),
            record(&mut rep, case, "flips", flipped),
            record(&mut rep, case, "reversed", reversed),
        ) {
            rep.check(case, format!("flips {spec}"), a.max_abs_diff(&b), 0.0);
            rep.check(case, format!("reversed {spec}"), a.max_abs_diff(&c), 0.0);
        }
        rep
    })
}

/// The edge total `T_{r,s}` vanishes, also after translation.
pub fn run_edge_total_suite(cfg: &SuiteConfig) -> SuiteReport {
    cases("edge-total", cfg, |case| {
        let mut rng = case_rng(cfg.seed, 7, case);
        let mut rep = SuiteReport::new("edge-total");
        let spec_p = if case % 10 == 9 {
            RandomBodySpec { kind: BodyKind::LiftedCap, dim: 3, scale: (1.0, 1.0) }
        } else {
            RandomBodySpec::hull(3, rng.gen_range(6..=20))
        };
        let p = random_polytope(&mut rng, &spec_p);
        let t = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let shifted = p.translate(&t);
        let diam = p.diameter();
        for r in 0..=4 {
            for s in 0..=4 - r {
                let spec = FunctionalSpec::new(Functional::GlobalT3 { r, s }, 0);
                let bound = cfg.edge_total_tol * diam.powi(r as i32 + 1);
                for (label, q) in [("", &p), ("translated ", &shifted)] {
                    if let Some(v) = record(&mut rep, case, "evaluate", evaluate(q, &spec, &RegionSpec::Full, &WeightFn::One)) {
                        rep.check(case, format!("{label}{spec}"), v.max_norm(), bound);
                    }
                }
            }
        }
        rep
    })
}

fn tilde2(p: &Polytope, k: usize, r: usize, s: usize) -> Result<SymTensor> {
    evaluate(p, &FunctionalSpec::new(Functional::GlobalPhiTilde2 { k, r, s }, 0), &RegionSpec::Full, &WeightFn::One)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramReport {
    pub p: usize,
    pub basis: Vec<FunctionalSpec>,
    pub rank: usize,
    pub condition: f64,
}

/// `Q^m PhiTilde_1^{r,s}`, `r, s >= 1`, `2m + r + s + 1 = p`.
pub fn tilde2_basis(p: usize) -> Vec<FunctionalSpec> {
    let mut out = Vec::new();
    for m in 0..=p / 2 {
        for r in 1..p {
            if 2 * m + r + 2 > p {
                break;
            }
            let s = p - 1 - 2 * m - r;
            if s >= 1 {
                out.push(FunctionalSpec::new(Functional::GlobalPhiTilde2 { k: 1, r, s }, m));
            }
        }
    }
    out
}

/// Numerical rank of the basis evaluated on `probes`, from the singular
/// values of the stacked coefficient vectors in the apolar norm.
pub fn gram_rank(p: usize, probes: &[Polytope]) -> Result<GramReport> {
    let basis = tilde2_basis(p);
    let weights: Vec<f64> = multi_indices(2, p).iter().map(|a| multinomial(a).sqrt()).collect();
    let mut rows = Vec::with_capacity(basis.len());
    for spec in &basis {
        let mut row = Vec::new();
        for q in probes {
            let v = evaluate(q, spec, &RegionSpec::Full, &WeightFn::One)?;
            row.extend(v.coeffs().iter().zip(&weights).map(|(c, w)| c * w));
        }
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    let flat: Vec<f64> = rows.concat();
    let m = DMatrix::from_row_slice(basis.len(), ncols, &flat);
    let sv = m.svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&x| x > 1e-10 * max).count();
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(GramReport { p, basis, rank, condition: if min > 0.0 { max / min } else { f64::INFINITY } })
}

/// The two-dimensional relations, and full rank of the proposed basis.
pub fn run_planar_basis_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut rep = cases("planar-basis", cfg, |case| {
        let mut rng = case_rng(cfg.seed, 8, case);
        let mut rep = SuiteReport::new("planar-basis");
        let spec_p = RandomBodySpec::pick(&mut rng, 2);
        let p = random_polytope(&mut rng, &spec_p);
        let radius = p.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        let perimeter: f64 = (0..p.num_faces(1)).map(|i| p.face_measure(1, i)).sum();
        for r in 0..=4 {
            let scale = radius.powi(r as i32) * perimeter.max(1.0);
            if let Some(v) = record(&mut rep, case, "edge", tilde2(&p, 1, r, 0)) {
                rep.check(case, format!("PhiTilde1^({r},0)"), v.max_norm(), cfg.rtol * scale);
            }
            if let Some(v) = record(&mut rep, case, "vertex", tilde2(&p, 0, 0, r)) {
                rep.check(case, format!("PhiTilde0^(0,{r})"), v.max_norm(), cfg.rtol * scale);
            }
        }
        for r in 1..=4 {
            for s in 1..=4 {
                let terms = tilde2(&p, 1, r - 1, s).and_then(|a| Ok((a, tilde2(&p, 0, r, s - 1)?)));
                if let Some((a, b)) = record(&mut rep, case, "mixed", terms) {
                    let (a, b) = (a.scaled(r as f64), b.scaled(s as f64));
                    let scale = 1f64.max(a.max_norm()).max(b.max_norm());
                    rep.check(case, format!("relation r={r} s={s}"), (&a + &b).max_norm(), cfg.rtol * scale);
                }
            }
        }
        rep
    });
    let mut rng = case_rng(cfg.seed, 9, 0);
    let probes: Vec<Polytope> = (0..8).map(|_| random_polytope(&mut rng, &RandomBodySpec::hull(2, 7))).collect();
    for p in 3..=5 {
        match gram_rank(p, &probes) {
            Ok(g) => {
                rep.notes.push(format!("basis p={p}: {} elements, rank {}, condition {:.3e}", g.basis.len(), g.rank, g.condition));
                rep.check(usize::MAX, format!("gram rank p={p}"), (g.basis.len() - g.rank) as f64, 0.0);
            }
            Err(e) => rep.fail(usize::MAX, format!("gram p={p}"), e.to_string()),
        }
    }
    rep
}

/// Weak-continuity limit of the edge tensor, persistence of the rotation
/// discrepancy for the non-extendable functional and its decay for the
/// extendable ones, the `W_1` floor, and Hausdorff convergence.
pub fn run_convergence_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut rep = SuiteReport::new("convergence");
    rep.cases = 1;
    let h = 0.5;
    let run = |spec: &str, weight: &WeightFn| -> Result<crate::approx::ConvergenceTable> {
        let mut exp = Experiment::new(FunctionalSpec::parse(spec)?, h, weight.clone());
        exp.serial = cfg.serial;
        convergence_experiment(&exp)
    };
    match tilted_bump(h, 0.2) {
        Ok(f) => {
            for s in 0..=2 {
                let spec = format!("PhiTilde3(0,{s},0)");
                let pair = run(&spec, &f).and_then(|t| Ok((t, smooth_cap_phitilde(h, 0, s, &f)?)));
                if let Some((table, smooth)) = record(&mut rep, 0, "smooth limit", pair) {
                    let lim = table.limit_tensor.expect("ladder has two rungs");
                    let err = lim.max_abs_diff(&smooth);
                    rep.notes.push(format!("{spec}: extrapolated relative error {:.3e}", err / smooth.max_norm()));
                    rep.check(0, format!("limit {spec}"), err, SMOOTH_LIMIT_RTOL * smooth.max_norm());
                }
            }
        }
        Err(e) => rep.fail(0, "tilted bump", e.to_string()),
    }
    let f = default_bump(h).expect("default bump");
    if let Some(table) = record(&mut rep, 0, "PhiTilde3(0,0,1)", run("PhiTilde3(0,0,1)", &f)) {
        let (lo, hi) = (table.min_discrepancy(), table.max_discrepancy());
        rep.notes.push(format!("PhiTilde3(0,0,1): |D| in [{lo:.4e}, {hi:.4e}]"));
        rep.check(0, "discrepancy positive", if hi > 0.0 { 0.0 } else { 1.0 }, 0.0);
        rep.check(0, "discrepancy persists", (DECAY_FACTOR * hi - lo).max(0.0), 0.0);
        let floor = table.w1_floor();
        rep.notes.push(format!("min W1/N = {floor:.6}"));
        rep.check(0, "W1 floor", if floor > 0.0 { 0.0 } else { 1.0 }, 0.0);
    }
    for spec in ["Phi(1,4,0,0)", "Phi(1,0,0,1)", "Phi(1,0,2,0)", "PhiTilde3(0,0,0)"] {
        if let Some(table) = record(&mut rep, 0, spec, run(spec, &f)) {
            let (fine, coarse) = table.discrepancy_ends().expect("rows");
            let scale = table.rows.iter().map(|r| r.value.abs()).fold(1.0, f64::max);
            let bound = (DECAY_FACTOR * coarse).max(DISCREPANCY_FLOOR * scale);
            rep.notes.push(format!("{spec}: |D| {coarse:.3e} -> {fine:.3e}"));
            rep.check(0, format!("discrepancy decays {spec}"), fine, bound);
        }
    }
    let mut last = f64::INFINITY;
    for t in [0.2, 0.1, 0.05] {
        if let Some(p) = record(&mut rep, 0, "build", ApproxParams::new(2, h, t).and_then(|p| build_pnht(&p))) {
            let d = hausdorff_to_cap(&p, h, 4000);
            rep.notes.push(format!("Hausdorff t={t}: {d:.4e}"));
            rep.check(0, format!("Hausdorff decreases at t={t}"), (d - last).max(0.0), 0.0);
            last = d;
        }
    }
    rep
}
