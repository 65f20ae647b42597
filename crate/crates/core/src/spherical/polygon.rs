use std::f64::consts::TAU;

use super::arc::{crossings, intersect, superlevel};
use super::quadrature::{gauss_legendre, integrate};
use super::region::Cap;
use super::weight::WeightFn;
use crate::error::{Error, Result};
use crate::geometry::SphericalPolygon;
use crate::tensor::{vector_power, SymTensor, Vec3};

pub const MAX_DEPTH: usize = 20;
pub const REL_TOL: f64 = 1e-10;
const BASE_ORDER: usize = 8;

/// Duffy-collapsed product rule on the flat triangle, projected radially.
fn base_rule(tri: &[Vec3; 3], s: usize) -> SymTensor {
    let [v0, v1, v2] = *tri;
    let det = v0.dot(&v1.cross(&v2)).abs();
    let (x, w) = gauss_legendre(BASE_ORDER);
    let mut out = SymTensor::zeros(3, s);
    for (xa, wa) in x.iter().zip(w) {
        let a = 0.5 * (xa + 1.0);
        for (xb, wb) in x.iter().zip(w) {
            let b = 0.5 * (xb + 1.0);
            let p = v0 + (v1 - v0) * a + (v2 - v1) * (a * b);
            let n = p.norm();
            let jac = 0.25 * wa * wb * a * det / (n * n * n);
            out.axpy(jac, &vector_power(3, &(p / n), s));
        }
    }
    out
}

fn children(t: &[Vec3; 3]) -> [[Vec3; 3]; 4] {
    let m = |a: &Vec3, b: &Vec3| (a + b).normalize();
    let (m01, m12, m20) = (m(&t[0], &t[1]), m(&t[1], &t[2]), m(&t[2], &t[0]));
    [[t[0], m01, m20], [m01, t[1], m12], [m20, m12, t[2]], [m01, m12, m20]]
}

fn refine(tri: &[Vec3; 3], coarse: SymTensor, s: usize, depth: usize) -> Result<SymTensor> {
    let kids = children(tri);
    let parts: Vec<SymTensor> = kids.iter().map(|k| base_rule(k, s)).collect();
    let mut fine = SymTensor::zeros(3, s);
    for p in &parts {
        fine += p;
    }
    let scale = fine.max_norm().max(crate::geometry::triangle_area(&tri[0], &tri[1], &tri[2]));
    if fine.max_abs_diff(&coarse) <= REL_TOL * scale {
        return Ok(fine);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::RefinementCap { depth, coarse: coarse.max_norm(), fine: fine.max_norm() });
    }
    let mut out = SymTensor::zeros(3, s);
    for (k, p) in kids.iter().zip(parts) {
        out += &refine(k, p, s, depth + 1)?;
    }
    Ok(out)
}

/// `int_poly u^s` by recursive four-way subdivision of the fan about the
/// centre, refined until successive estimates agree to `REL_TOL`.
pub fn polygon_moment_subdivision(poly: &SphericalPolygon, s: usize) -> Result<SymTensor> {
    let c = poly.center();
    let n = poly.vertices.len();
    let mut out = SymTensor::zeros(3, s);
    for i in 0..n {
        let tri = [c, poly.vertices[i], poly.vertices[(i + 1) % n]];
        out += &refine(&tri, base_rule(&tri, s), s, 1)?;
    }
    Ok(out)
}

const INNER_ORDER: usize = 24;
const OUTER_ORDER: usize = 16;
const OUTER_MAX_DEPTH: usize = 30;

struct Polar<'a> {
    c: Vec3,
    ea: Vec3,
    eb: Vec3,
    normals: Vec<Vec3>,
    caps: &'a [Cap],
    weight: &'a WeightFn,
    s: usize,
}

impl Polar<'_> {
    /// Inner integral along the geodesic from the centre in direction `chi`.
    fn ray(&self, chi: f64) -> SymTensor {
        let w = self.ea * chi.cos() + self.eb * chi.sin();
        let exit = self
            .normals
            .iter()
            .map(|m| self.c.dot(m).atan2(-w.dot(m)))
            .fold(std::f64::consts::PI, f64::min);
        let mut iv = vec![(0.0, exit)];
        for cap in self.caps {
            iv = intersect(&iv, &superlevel(self.c.dot(&cap.c), w.dot(&cap.c), cap.tau, 0.0, exit));
        }
        let cuts_for = |lo: f64, hi: f64| -> Vec<f64> {
            let mut cuts = vec![lo, hi];
            if let WeightFn::Bump { pole, tau0, tau1 } = self.weight {
                let (a, b) = (self.c.dot(pole), w.dot(pole));
                cuts.extend(crossings(a, b, *tau0, lo, hi));
                cuts.extend(crossings(a, b, *tau1, lo, hi));
            }
            cuts.sort_by(f64::total_cmp);
            cuts
        };
        let mut out = SymTensor::zeros(3, self.s);
        for (lo, hi) in iv {
            for piece in cuts_for(lo, hi).windows(2) {
                if piece[1] <= piece[0] {
                    continue;
                }
                let m = 0.5 * (piece[0] + piece[1]);
                if self.weight.eval(&(self.c * m.cos() + w * m.sin())) == 0.0 {
                    continue;
                }
                out += &integrate(piece[0], piece[1], INNER_ORDER, SymTensor::zeros(3, self.s), |psi, wt| {
                    let u = self.c * psi.cos() + w * psi.sin();
                    vector_power(3, &u, self.s).scaled(wt * psi.sin() * self.weight.eval(&u))
                });
            }
        }
        out
    }

    fn rule(&self, a: f64, b: f64) -> SymTensor {
        integrate(a, b, OUTER_ORDER, SymTensor::zeros(3, self.s), |chi, w| self.ray(chi).scaled(w))
    }

    fn adapt(&self, a: f64, b: f64, whole: SymTensor, depth: usize) -> SymTensor {
        let m = 0.5 * (a + b);
        let (l, r) = (self.rule(a, m), self.rule(m, b));
        let halves = &l + &r;
        let tol = 1e-13 * (b - a).max(1e-3) + 1e-12 * halves.max_norm() * (b - a) / TAU;
        if depth >= OUTER_MAX_DEPTH || halves.max_abs_diff(&whole) <= tol {
            return halves;
        }
        &self.adapt(a, m, l, depth + 1) + &self.adapt(m, b, r, depth + 1)
    }
}

/// `int_{poly cap caps} f(u) u^s` in geodesic polar coordinates about the
/// polygon centre; cap boundaries and weight kinks are resolved exactly
/// along each ray.
pub fn polygon_moment_polar(poly: &SphericalPolygon, s: usize, caps: &[Cap], weight: &WeightFn) -> SymTensor {
    let c = poly.center();
    let seed = if c.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let ea = (seed - c * c.dot(&seed)).normalize();
    let eb = c.cross(&ea);
    let polar = Polar { c, ea, eb, normals: poly.edge_normals(), caps, weight, s };
    let mut angles: Vec<f64> = poly
        .vertices
        .iter()
        .map(|v| {
            let a = v.dot(&eb).atan2(v.dot(&ea));
            if a < 0.0 {
                a + TAU
            } else {
                a
            }
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    angles.push(angles[0] + TAU);
    let mut out = SymTensor::zeros(3, s);
    for w in angles.windows(2) {
        out += &polar.adapt(w[0], w[1], polar.rule(w[0], w[1]), 0);
    }
    out
}

/// `int_{poly cap caps} f(u) u^s dH^2(u)`.
pub fn polygon_moment(poly: &SphericalPolygon, s: usize, caps: &[Cap], weight: &WeightFn) -> Result<SymTensor> {
    match weight {
        WeightFn::Zero => Ok(SymTensor::zeros(3, s)),
        WeightFn::One if caps.is_empty() => polygon_moment_subdivision(poly, s),
        _ => Ok(polygon_moment_polar(poly, s, caps, weight)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn octant() -> SphericalPolygon {
        SphericalPolygon { vertices: vec![Vec3::x(), Vec3::y(), Vec3::z()] }
    }

    #[test]
    fn octant_area_and_first_moment() {
        let a = polygon_moment_subdivision(&octant(), 0).unwrap();
        assert!((a.as_scalar().unwrap() - FRAC_PI_2).abs() < 1e-12);
        // int u1 over the octant is the projected area pi/4
        let m = polygon_moment_subdivision(&octant(), 1).unwrap();
        let expect = SymTensor::vector(3, &(Vec3::new(1.0, 1.0, 1.0) * (std::f64::consts::PI / 4.0)));
        assert!(m.approx_eq(&expect, 1e-11, 0.0), "{m:?}");
    }

    #[test]
    fn polar_agrees_with_subdivision() {
        let poly = SphericalPolygon {
            vertices: vec![
                Vec3::new(1.0, 0.1, 0.2).normalize(),
                Vec3::new(0.2, 1.0, 0.1).normalize(),
                Vec3::new(-0.3, 0.4, 1.0).normalize(),
                Vec3::new(0.5, -0.2, 1.0).normalize(),
            ],
        };
        for s in 0..4 {
            let a = polygon_moment_subdivision(&poly, s).unwrap();
            let b = polygon_moment_polar(&poly, s, &[], &WeightFn::One);
            assert!(a.approx_eq(&b, 1e-11, 0.0), "s={s}: {}", a.max_abs_diff(&b));
        }
    }

    #[test]
    fn hemisphere_cap_halves_octant() {
        // the plane x = y splits the octant symmetrically
        let c = Vec3::new(1.0, -1.0, 0.0).normalize();
        let half = polygon_moment_polar(&octant(), 0, &[Cap { c, tau: 0.0 }], &WeightFn::One);
        assert!((half.as_scalar().unwrap() - FRAC_PI_2 / 2.0).abs() < 1e-11);
    }
}
