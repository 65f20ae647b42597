use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::approx::{ApproxParams, Approximant};
use crate::geometry::Polytope;
use crate::spherical::{Cap, RegionBox, RegionSpec, RegionTerm, Slab, WeightFn};
use crate::tensor::{Rotation, Vec3};
use crate::valuations::{Functional, FunctionalSpec};

/// Independent stream per `(suite, case)`, so cases can run in any order.
pub(crate) fn case_rng(seed: u64, tag: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 32) | case as u64);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BodyKind {
    /// Hull of this many uniform points in a ball.
    Hull(usize),
    Box,
    Simplex,
    /// `P^2_{h,t}` for random `h`, `t`; dimension 3 only.
    LiftedCap,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomBodySpec {
    pub kind: BodyKind,
    pub dim: usize,
    pub scale: (f64, f64),
}

impl RandomBodySpec {
    pub fn hull(dim: usize, points: usize) -> RandomBodySpec {
        RandomBodySpec { kind: BodyKind::Hull(points), dim, scale: (0.5, 2.0) }
    }

    /// Mixture used by most suites.
    pub fn pick<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> RandomBodySpec {
        let kind = match rng.gen_range(0..8) {
            0 => BodyKind::Box,
            1 => BodyKind::Simplex,
            _ => BodyKind::Hull(rng.gen_range(dim + 3..=14)),
        };
        RandomBodySpec { kind, dim, scale: (0.5, 2.0) }
    }
}

fn in_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), if dim == 3 { rng.gen_range(-1.0..1.0) } else { 0.0 });
        if v.norm_squared() <= 1.0 {
            return v;
        }
    }
}

pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Rotation {
    Rotation::random_proper(dim, rng)
}

pub fn random_polytope<R: Rng + ?Sized>(rng: &mut R, spec: &RandomBodySpec) -> Polytope {
    let dim = spec.dim;
    loop {
        let scale = rng.gen_range(spec.scale.0..=spec.scale.1);
        let centre = in_ball(rng, dim);
        let built = match spec.kind {
            BodyKind::Hull(k) => {
                let pts: Vec<Vec3> = (0..k.max(dim + 1)).map(|_| centre + in_ball(rng, dim) * scale).collect();
                Polytope::hull(dim, &pts)
            }
            BodyKind::Simplex => {
                let pts: Vec<Vec3> = (0..=dim).map(|_| centre + in_ball(rng, dim) * scale).collect();
                Polytope::hull(dim, &pts)
            }
            BodyKind::Box => {
                let rot = random_rotation(rng, dim);
                let half: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.2..=1.0) * scale).collect();
                let mut pts = Vec::new();
                for mask in 0..(1 << dim) {
                    let mut v = Vec3::zeros();
                    for (i, h) in half.iter().enumerate() {
                        v[i] = if mask & (1 << i) == 0 { -h } else { *h };
                    }
                    pts.push(centre + rot.apply(&v));
                }
                Polytope::hull(dim, &pts)
            }
            BodyKind::LiftedCap => {
                let h = rng.gen_range(0.3..=0.8);
                let t = [0.2, 0.25, 0.3][rng.gen_range(0..3)];
                ApproxParams::new(2, h, t).and_then(|p| Approximant::build(&p)).map(|a| a.polytope.translate(&centre))
            }
        };
        // thin bodies make every relative tolerance meaningless
        if let Ok(p) = built {
            if p.volume() > 1e-3 * p.diameter().powi(dim as i32) {
                return p;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpecFamily {
    /// `Phi` and the other reflection-covariant functionals.
    Even,
    /// The orientation-sensitive functionals.
    Tilde,
}

/// A random functional of rank at most `max_rank`; totals only when
/// `global` is set.
pub fn random_spec<R: Rng + ?Sized>(rng: &mut R, dim: usize, family: SpecFamily, max_rank: usize, global: bool) -> FunctionalSpec {
    loop {
        let (r, s) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
        let m = if rng.gen_bool(0.2) { 1 } else { 0 };
        let kind = match (family, dim, global) {
            (SpecFamily::Even, 3, _) => {
                let k = rng.gen_range(0..=2);
                let j = if k == 1 { rng.gen_range(0..=1) } else { 0 };
                if rng.gen_bool(0.1) {
                    Functional::W1
                } else {
                    Functional::Phi { k, r, s, j }
                }
            }
            (SpecFamily::Even, _, false) => Functional::Phi { k: rng.gen_range(0..=1), r, s, j: 0 },
            (SpecFamily::Even, _, true) => match rng.gen_range(0..3) {
                0 => Functional::GlobalPsi2Vol { r },
                _ => Functional::GlobalPsi2 { k: rng.gen_range(0..=1), r, s },
            },
            (SpecFamily::Tilde, 3, false) => Functional::PhiTilde3 { r, s, j: rng.gen_range(0..=1) },
            (SpecFamily::Tilde, 3, true) => Functional::GlobalT3 { r, s },
            (SpecFamily::Tilde, _, false) => Functional::PhiTilde2 { k: rng.gen_range(0..=1), r, s },
            (SpecFamily::Tilde, _, true) => Functional::GlobalPhiTilde2 { k: rng.gen_range(0..=1), r, s },
        };
        let spec = FunctionalSpec::new(kind, m);
        if spec.rank() <= max_rank && spec.validate(dim).is_ok() {
            return spec;
        }
    }
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec3 {
    loop {
        let v = in_ball(rng, dim);
        if v.norm() > 0.1 {
            return v.normalize();
        }
    }
}

fn random_cap<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Cap {
    Cap::new(random_unit(rng, dim), rng.gen_range(-0.6..=0.6)).expect("unit centre")
}

/// Full, or a union of one or two box-cap products placed over `p`.
pub fn random_region<R: Rng + ?Sized>(rng: &mut R, p: &Polytope) -> RegionSpec {
    let dim = p.dim();
    if rng.gen_bool(0.25) {
        return RegionSpec::Full;
    }
    let terms = (0..rng.gen_range(1..=2))
        .map(|_| {
            let bbox = rng.gen_bool(0.7).then(|| {
                let rot = random_rotation(rng, dim);
                let centre = p.centroid() + in_ball(rng, dim) * (0.3 * p.diameter());
                let half = rng.gen_range(0.2..=0.6) * p.diameter();
                RegionBox {
                    slabs: (0..dim)
                        .map(|i| {
                            let w = rot.column(i);
                            let c = w.dot(&centre);
                            Slab { w, lo: c - half, hi: c + half }
                        })
                        .collect(),
                }
            });
            let cap = (bbox.is_none() || rng.gen_bool(0.5)).then(|| random_cap(rng, dim));
            RegionTerm { bbox, cap }
        })
        .collect();
    RegionSpec::Union(terms)
}

pub fn random_weight<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> WeightFn {
    if rng.gen_bool(0.5) {
        return WeightFn::One;
    }
    let tau0 = rng.gen_range(-0.4..=0.4);
    let tau1 = tau0 + rng.gen_range(0.1..=0.5);
    WeightFn::bump(random_unit(rng, dim), tau0, tau1).expect("valid bump")
}
