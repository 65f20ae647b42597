//! The paraboloid cap `K_h = {z >= |x'|^2, z <= h}` and the extension of
//! `PhiTilde3(r, s, 0)` and `W1` to its smooth boundary part.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::spherical::{gauss_legendre, WeightFn};
use crate::tensor::{vector_power, SymTensor, Vec3};

pub const RADIAL_NODES: usize = 128;
pub const ANGULAR_NODES: usize = 256;

/// Differential data at a point of the graph `z = |x'|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothCapSample {
    pub x: Vec3,
    /// Outer unit normal of `K_h`.
    pub u: Vec3,
    pub k1: f64,
    pub k2: f64,
    /// Meridian direction.
    pub b1: Vec3,
    /// Parallel direction.
    pub b2: Vec3,
    /// `sqrt(1 + k1^2) sqrt(1 + k2^2)`.
    pub kk: f64,
    /// Surface element `dA / (drho dchi)`.
    pub area_element: f64,
}

impl SmoothCapSample {
    pub fn at(rho: f64, chi: f64) -> SmoothCapSample {
        let (c, s) = (chi.cos(), chi.sin());
        let q = (1.0 + 4.0 * rho * rho).sqrt();
        let u = Vec3::new(2.0 * rho * c, 2.0 * rho * s, -1.0) / q;
        let mut b1 = Vec3::new(c, s, 2.0 * rho) / q;
        let b2 = Vec3::new(-s, c, 0.0);
        // keep (b1, b2, u) positively oriented
        if b1.cross(&b2).dot(&u) < 0.0 {
            b1 = -b1;
        }
        let (k1, k2) = (2.0 / (q * q * q), 2.0 / q);
        SmoothCapSample {
            x: Vec3::new(rho * c, rho * s, rho * rho),
            u,
            k1,
            k2,
            b1,
            b2,
            kk: (1.0 + k1 * k1).sqrt() * (1.0 + k2 * k2).sqrt(),
            area_element: rho * q,
        }
    }
}

/// Largest radius whose normals meet the support of `f`, capped at `2 sqrt(h)`.
fn support_radius(h: f64, weight: &WeightFn) -> f64 {
    let limit = 2.0 * h.sqrt();
    let cap = match weight.support() {
        None => return limit,
        Some(c) => c,
    };
    let a = cap.c.xy().norm();
    let reach = |rho: f64| (2.0 * rho * a - cap.c.z) / (1.0 + 4.0 * rho * rho).sqrt() >= cap.tau;
    let n = 4000;
    (0..=n).rev().map(|i| limit * i as f64 / n as f64).find(|&r| reach(r)).unwrap_or(0.0)
}

/// Radii in `(0, rmax)` where `<u(rho, chi), pole> = tau`.
fn level_radii(a: f64, p3: f64, tau: f64, rmax: f64) -> Vec<f64> {
    // (2 rho a - p3)^2 = tau^2 (1 + 4 rho^2) with matching sign
    let (qa, qb, qc) = (4.0 * (a * a - tau * tau), -4.0 * a * p3, p3 * p3 - tau * tau);
    let mut roots = Vec::new();
    if qa.abs() < 1e-14 {
        if qb != 0.0 {
            roots.push(-qc / qb);
        }
    } else {
        let d = qb * qb - 4.0 * qa * qc;
        if d >= 0.0 {
            let sq = d.sqrt();
            roots.push((-qb - sq) / (2.0 * qa));
            roots.push((-qb + sq) / (2.0 * qa));
        }
    }
    roots.retain(|&r| r > 0.0 && r < rmax && (2.0 * r * a - p3) * tau >= 0.0);
    roots
}

fn integrate_cap<F>(h: f64, rank: usize, weight: &WeightFn, integrand: F) -> Result<SymTensor>
where
    F: Fn(&SmoothCapSample) -> SymTensor,
{
    if h <= 0.0 {
        return Err(Error::InvalidParams(format!("cap height must be positive, got {h}")));
    }
    let rim = h.sqrt();
    if weight.is_zero() {
        return Ok(SymTensor::zeros(3, rank));
    }
    let radius = support_radius(h, weight);
    if radius >= rim * (1.0 - 1e-9) {
        return Err(Error::SupportReachesRim { radius, limit: rim });
    }
    let (x, w) = gauss_legendre(RADIAL_NODES);
    let mut out = SymTensor::zeros(3, rank);
    for i in 0..ANGULAR_NODES {
        let chi = TAU * i as f64 / ANGULAR_NODES as f64;
        let mut cuts = vec![0.0, rim];
        if let WeightFn::Bump { pole, tau0, tau1 } = weight {
            let a = pole.x * chi.cos() + pole.y * chi.sin();
            cuts.extend(level_radii(a, pole.z, *tau0, rim));
            cuts.extend(level_radii(a, pole.z, *tau1, rim));
        }
        cuts.sort_by(f64::total_cmp);
        for piece in cuts.windows(2) {
            let (lo, hi) = (piece[0], piece[1]);
            if hi <= lo || weight.eval(&SmoothCapSample::at(0.5 * (lo + hi), chi).u) == 0.0 {
                continue;
            }
            let (m, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for (xi, wi) in x.iter().zip(w) {
                let smp = SmoothCapSample::at(m + half * xi, chi);
                let f = weight.eval(&smp.u);
                if f != 0.0 {
                    out.axpy(f * wi * half * smp.area_element * TAU / ANGULAR_NODES as f64, &integrand(&smp));
                }
            }
        }
    }
    Ok(out)
}

/// `int f x^r u^s (k1 b1 (u x b1) + k2 b2 (u x b2)) / KK` over the normal
/// bundle of the smooth part of `dK_h`, i.e. against `KK dA`.
pub fn smooth_cap_phitilde(h: f64, r: usize, s: usize, weight: &WeightFn) -> Result<SymTensor> {
    integrate_cap(h, r + s + 2, weight, |p| {
        let xu = vector_power(3, &p.x, r).product_unchecked(&vector_power(3, &p.u, s));
        let mut frame = SymTensor::vector(3, &p.b1).product_unchecked(&SymTensor::vector(3, &p.u.cross(&p.b1)));
        frame = frame.scaled(p.k1);
        frame.axpy(p.k2, &SymTensor::vector(3, &p.b2).product_unchecked(&SymTensor::vector(3, &p.u.cross(&p.b2))));
        xu.product_unchecked(&frame)
    })
}

/// `W_1(K_h, f) = int f (k1 + k2) dA`.
pub fn smooth_cap_w1(h: f64, weight: &WeightFn) -> Result<f64> {
    let t = integrate_cap(h, 0, weight, |p| SymTensor::scalar(3, p.k1 + p.k2))?;
    Ok(t.as_scalar().expect("scalar"))
}

/// Support function of `K_h`.
pub fn cap_support(h: f64, u: &Vec3) -> f64 {
    let a = u.xy().norm();
    if u.z < 0.0 {
        let rho = a / (-2.0 * u.z);
        if rho <= h.sqrt() {
            return -a * a / (4.0 * u.z);
        }
    }
    h.sqrt() * a + u.z * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Rotation;

    fn bump(h: f64) -> WeightFn {
        let tau0 = 1.0 / (1.0 + 2.0 * h).sqrt();
        WeightFn::bump(-Vec3::z(), tau0, 0.5 * (1.0 + tau0)).unwrap()
    }

    #[test]
    fn frame_is_orthonormal() {
        let p = SmoothCapSample::at(0.3, 1.1);
        assert!((p.b1.dot(&p.b2)).abs() < 1e-15 && p.b1.dot(&p.u).abs() < 1e-15);
        assert!((p.b1.cross(&p.b2).dot(&p.u) - 1.0).abs() < 1e-14);
        assert!((p.x.z - p.x.xy().norm_squared()).abs() < 1e-15);
    }

    #[test]
    fn rotation_invariance() {
        let t = smooth_cap_phitilde(0.5, 1, 1, &bump(0.5)).unwrap();
        let rot = Rotation::about_axis(&Vec3::z(), 0.7);
        assert!(t.rotate(&rot).unwrap().approx_eq(&t, 1e-8, 0.0));
        assert!(smooth_cap_phitilde(0.5, 0, 0, &WeightFn::Zero).unwrap().is_zero());
    }

    #[test]
    fn rejects_rim_support() {
        assert!(matches!(smooth_cap_phitilde(0.5, 0, 0, &WeightFn::One), Err(Error::SupportReachesRim { .. })));
    }

    #[test]
    fn support_function_matches_samples() {
        let h: f64 = 0.5;
        for u in [Vec3::new(0.3, -0.2, -1.0), Vec3::new(1.0, 0.5, -0.2), Vec3::new(0.1, 0.0, 1.0)] {
            let u = u.normalize();
            let mut best = f64::NEG_INFINITY;
            for i in 0..400 {
                for j in 0..400 {
                    let rho = h.sqrt() * i as f64 / 399.0;
                    let chi = TAU * j as f64 / 400.0;
                    best = best.max(SmoothCapSample::at(rho, chi).x.dot(&u));
                }
            }
            assert!((best - cap_support(h, &u)).abs() < 1e-4, "{u:?}");
        }
    }
}
