//! Polytopal approximations of the paraboloid cap `K_h` by lifted planar
//! lattices, and the experiments run on them.

mod assumptions;
mod experiment;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Arc, NormalCone, Polytope};
use crate::spherical::WeightFn;
use crate::tensor::{Rotation, Vec3};
use crate::valuations::cap_support;

pub use assumptions::{check_assumptions, find_parameters, AssumptionReport, ParameterSearch};
pub use experiment::{convergence_experiment, richardson, ConvergenceRow, ConvergenceTable, Experiment};

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxParams {
    /// 2, or an odd number at least 3.
    pub n: usize,
    pub h: f64,
    pub t: f64,
}

impl ApproxParams {
    pub fn new(n: usize, h: f64, t: f64) -> Result<ApproxParams> {
        if n != 2 && (n < 3 || n.is_multiple_of(2)) {
            return Err(Error::InvalidParams(format!("N must be 2 or odd and at least 3, got {n}")));
        }
        if !(h > 0.0 && h.is_finite()) || !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParams(format!("h and t must be positive, got h = {h}, t = {t}")));
        }
        if t > h.sqrt() {
            return Err(Error::InvalidParams(format!("t = {t} exceeds sqrt(h) = {}, the cap is under-resolved", h.sqrt())));
        }
        Ok(ApproxParams { n, h, t })
    }

    pub fn beta(&self) -> f64 {
        PI / self.n as f64
    }

    /// Lattice directions `l_r`, `r = 0..N`.
    pub fn ell(&self) -> Vec<Vec3> {
        (0..self.n).map(|r| ell(self.n, r)).collect()
    }

    /// Rotation about `e3` by `pi / N`.
    pub fn theta(&self) -> Rotation {
        Rotation::about_axis(&Vec3::z(), self.beta())
    }
}

pub fn ell(n: usize, r: usize) -> Vec3 {
    let a = r as f64 * PI / n as f64;
    Vec3::new(a.cos(), a.sin(), 0.0)
}

pub fn lift(x: f64, y: f64) -> Vec3 {
    Vec3::new(x, y, x * x + y * y)
}

/// Lattice points of `t C_N` within distance `radius` of the origin.
fn lattice_points(n: usize, t: f64, radius: f64) -> Vec<(f64, f64)> {
    let (z1, z2) = if n == 2 {
        ((1.0, 0.0), (0.0, 1.0))
    } else {
        let b = PI / n as f64;
        ((1.0, 0.0), (b.cos(), b.sin()))
    };
    // the lattice basis spans an angle of at least pi / N, so this range covers the disk
    let m = (radius / (t * (PI / n as f64).sin())).ceil() as i64 + 1;
    let mut pts = Vec::new();
    for i in -m..=m {
        for j in -m..=m {
            let x = t * (i as f64 * z1.0 + j as f64 * z2.0);
            let y = t * (i as f64 * z1.1 + j as f64 * z2.1);
            if x * x + y * y <= radius * radius {
                pts.push((x, y));
            }
        }
    }
    pts
}

/// `R(t C_N) cap {z <= h}`, a single lifted lattice cap.
pub fn lifted_cap(n: usize, h: f64, t: f64) -> Result<Polytope> {
    let radius = h.sqrt() + 2.0 * t;
    let pts: Vec<Vec3> = lattice_points(n, t, radius).into_iter().map(|(x, y)| lift(x, y)).collect();
    Polytope::hull(3, &pts)?.clip_halfspace(&Vec3::z(), h)
}

/// `P^N_{h,t}` together with the lattice class of each edge.
#[derive(Clone, Debug)]
pub struct Approximant {
    pub params: ApproxParams,
    pub polytope: Polytope,
    /// `Some(r)` for edges lying above a lattice edge parallel to `l_r`.
    pub classes: Vec<Option<usize>>,
}

impl Approximant {
    /// The lifted square-grid cap for `N = 2`, and the Minkowski average of
    /// `N` rotated lifted triangle-lattice caps for odd `N`.
    pub fn build(params: &ApproxParams) -> Result<Approximant> {
        const TOL: f64 = 1e-9;
        let cap = lifted_cap(params.n, params.h, params.t)?;
        let n = params.n as f64;
        let lattice_vectors = |p: &Polytope| -> Vec<Vec3> {
            (0..p.num_faces(1))
                .filter_map(|i| {
                    let [a, b] = p.edge_endpoints(i);
                    let (va, vb) = (p.vertices()[a], p.vertices()[b]);
                    (va.z < params.h - TOL && vb.z < params.h - TOL).then(|| vb - va)
                })
                .collect()
        };
        let (polytope, vectors) = if params.n == 2 {
            let v = lattice_vectors(&cap);
            (cap, v)
        } else {
            let theta = params.theta();
            let mut vectors: Vec<Vec3> = lattice_vectors(&cap).iter().map(|v| v / n).collect();
            let mut copy = cap.clone();
            let mut sum = cap;
            for _ in 1..params.n {
                copy = copy.apply_rotation(&theta)?;
                vectors.extend(lattice_vectors(&copy).iter().map(|v| v / n));
                sum = sum.minkowski_sum(&copy)?;
            }
            (sum.scale(1.0 / n)?, vectors)
        };
        let mut keyed = vectors;
        keyed.sort_by(|a, b| a.x.total_cmp(&b.x));
        let known = |d: &Vec3| {
            let lo = keyed.partition_point(|v| v.x < d.x - TOL);
            keyed[lo..].iter().take_while(|v| v.x <= d.x + TOL).any(|v| (v - d).norm() < TOL)
        };
        let ell = params.ell();
        let classes = (0..polytope.num_faces(1))
            .map(|i| {
                let [a, b] = polytope.edge_endpoints(i);
                let d = polytope.vertices()[b] - polytope.vertices()[a];
                let is_lattice = known(&d) || known(&-d);
                let dp = Vec3::new(d.x, d.y, 0.0);
                if !is_lattice || dp.norm() < TOL {
                    return None;
                }
                let dp = dp.normalize();
                ell.iter().position(|l| dp.cross(l).norm() < TOL)
            })
            .collect();
        Ok(Approximant { params: params.clone(), polytope, classes })
    }

    /// Edges whose normal arc meets the open set `{f > 0}`.
    pub fn touched_edges(&self, weight: &WeightFn) -> Vec<usize> {
        let cap = match weight.support() {
            None => return (0..self.polytope.num_faces(1)).collect(),
            Some(c) => c,
        };
        (0..self.polytope.num_faces(1))
            .filter(|&i| match self.polytope.normal_cone(1, i) {
                NormalCone::Arc(arc) => arc_max(&arc, &cap.c) > cap.tau,
                _ => false,
            })
            .collect()
    }

    /// The canonical `v_F` of a classified edge: `<v_F, l_r> > 0`.
    pub fn canonical_edge_vector(&self, i: usize) -> Option<Vec3> {
        let r = self.classes[i]?;
        let v = self.polytope.edge_vector(i);
        Some(if v.dot(&ell(self.params.n, r)) < 0.0 { -v } else { v })
    }
}

/// `max <u, c>` over an arc.
pub(crate) fn arc_max(arc: &Arc, c: &Vec3) -> f64 {
    let (a, b) = (arc.start.dot(c), arc.ortho.dot(c));
    let peak = b.atan2(a);
    let peak = if peak < 0.0 { peak + 2.0 * PI } else { peak };
    let mut best = a.max(a * arc.angle.cos() + b * arc.angle.sin());
    if peak <= arc.angle {
        best = best.max(a.hypot(b));
    }
    best
}

/// `P^N_{h,t}`.
pub fn build_pnht(params: &ApproxParams) -> Result<Polytope> {
    Approximant::build(params).map(|a| a.polytope)
}

/// Normal-height threshold of `omega_h`: normals at points below `h / 2`
/// satisfy `<u, -e3> > 1 / sqrt(1 + 2h)`.
pub fn omega_threshold(h: f64) -> f64 {
    1.0 / (1.0 + 2.0 * h).sqrt()
}

/// The `SO(3, e3)`-invariant bump `g(<u, -e3>)` supported in `omega_h`.
pub fn default_bump(h: f64) -> Result<WeightFn> {
    let tau0 = omega_threshold(h);
    WeightFn::bump(-Vec3::z(), tau0, 0.5 * (1.0 + tau0))
}

/// A bump whose pole is tilted by `tilt` from `-e3` towards `e1`, with the
/// cap radius shrunk so its support stays inside `omega_h`.
pub fn tilted_bump(h: f64, tilt: f64) -> Result<WeightFn> {
    let radius = omega_threshold(h).acos() - tilt;
    if !(tilt >= 0.0 && radius > 0.0) {
        return Err(Error::InvalidParams(format!("tilt {tilt} leaves no room inside omega_h for h = {h}")));
    }
    let pole = Vec3::new(tilt.sin(), 0.0, -tilt.cos());
    let tau0 = radius.cos();
    WeightFn::bump(pole, tau0, 0.5 * (1.0 + tau0))
}

/// Sample directions roughly uniform on the sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Hausdorff distance to `K_h` as the largest support-function gap over
/// `samples` directions.
pub fn hausdorff_to_cap(p: &Polytope, h: f64, samples: usize) -> f64 {
    fibonacci_sphere(samples)
        .iter()
        .map(|u| (p.support(u) - cap_support(h, u)).abs())
        .fold(0.0, f64::max)
}

/// Evaluates `F_1` (`nu = 1`) or `F_2` (`nu = 2`) at `x = (lambda, sqrt(1 - lambda^2), 0)`; `coeffs` holds
/// `(j, c_j)` pairs.
pub fn predict_f(nu: usize, lambda: f64, coeffs: &[(usize, f64)], n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParams(format!("lambda = {lambda} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::InvalidParams("N must be positive".into()));
    }
    let x = Vec3::new(lambda, (1.0 - lambda * lambda).sqrt(), 0.0);
    let mut out = 0.0;
    for &(j, c) in coeffs {
        for r in 0..n {
            let l = ell(n, r);
            let dot = l.dot(&x);
            out += c * match nu {
                1 => dot.powi(2 * j as i32),
                // det(l, -e3, x)
                2 => dot.powi(2 * j as i32 + 1) * l.dot(&(-Vec3::z()).cross(&x)),
                _ => return Err(Error::InvalidParams(format!("nu must be 1 or 2, got {nu}"))),
            };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_params() {
        assert!(ApproxParams::new(4, 0.5, 0.1).is_err());
        assert!(ApproxParams::new(2, 0.5, 1.0).is_err());
        assert!(ApproxParams::new(3, 0.5, 0.1).is_ok());
    }

    #[test]
    fn square_grid_cap_is_quarter_turn_invariant() {
        let params = ApproxParams::new(2, 0.5, 0.2).unwrap();
        let p = build_pnht(&params).unwrap();
        let q = p.apply_rotation(&params.theta()).unwrap();
        assert!(p.approx_same(&q, 1e-9));
        assert!(p.vertices().iter().all(|v| v.z <= 0.5 + 1e-12 && v.z >= v.xy().norm_squared() - 1e-12));
    }

    #[test]
    fn triangle_lattice_average_is_invariant() {
        let params = ApproxParams::new(3, 0.5, 0.35).unwrap();
        let p = build_pnht(&params).unwrap();
        let q = p.apply_rotation(&params.theta()).unwrap();
        assert!(p.approx_same(&q, 1e-9));
    }

    #[test]
    fn f1_examples() {
        assert!((predict_f(1, 0.0, &[(2, 1.0)], 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((predict_f(1, 0.5, &[(2, 1.0)], 2).unwrap() - (0.0625 + 0.5625)).abs() < 1e-15);
        assert!(predict_f(2, 0.0, &[(1, 1.0), (2, -0.5)], 2).unwrap().abs() < 1e-15);
        assert!((predict_f(1, 1.0, &[(2, 1.0)], 2).unwrap() - 1.0).abs() < 1e-15);
        assert!(predict_f(1, 1.5, &[(2, 1.0)], 2).is_err());
    }

    #[test]
    fn bumps_stay_inside_omega() {
        let h = 0.5;
        let w = tilted_bump(h, 0.2).unwrap();
        let cap = w.support().unwrap();
        let radius = cap.tau.acos() + 0.2;
        assert!((radius - omega_threshold(h).acos()).abs() < 1e-12);
        assert_eq!(default_bump(h).unwrap().eval(&-Vec3::z()), 1.0);
    }
}
