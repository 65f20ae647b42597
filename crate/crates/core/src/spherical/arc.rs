use std::f64::consts::TAU;

use super::quadrature::integrate;
use super::region::Cap;
use super::weight::WeightFn;
use crate::geometry::Arc;
use crate::tensor::{ubar2, vector_power, SymTensor, Vec3};

/// Optional linear vector factor multiplying `u^s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extra {
    None,
    /// `v x u` (3D).
    Cross(Vec3),
    /// `ubar(u)` (2D).
    Ubar,
}

impl Extra {
    pub fn apply(&self, u: &Vec3) -> Option<Vec3> {
        match self {
            Extra::None => None,
            Extra::Cross(v) => Some(v.cross(u)),
            Extra::Ubar => Some(ubar2(u)),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Extra::None => 0,
            _ => 1,
        }
    }
}

/// `u^s (x) extra(u)` at a single direction.
pub(crate) fn integrand(dim: usize, u: &Vec3, s: usize, extra: &Extra) -> SymTensor {
    let p = vector_power(dim, u, s);
    match extra.apply(u) {
        None => p,
        Some(e) => p.product_unchecked(&SymTensor::vector(dim, &e)),
    }
}

/// Subintervals of `[lo, hi]` on which `a cos t + b sin t >= tau`.
pub(crate) fn superlevel(a: f64, b: f64, tau: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let r = a.hypot(b);
    let k = if r > 0.0 { tau / r } else if tau <= 0.0 { -1.0 } else { 1.0 };
    if k <= -1.0 {
        return vec![(lo, hi)];
    }
    if k >= 1.0 {
        return Vec::new();
    }
    let (g, d) = (b.atan2(a), k.acos());
    let shift = ((lo - g) / TAU).floor() - 1.0;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for j in 0..4 {
        let c = g + TAU * (shift + j as f64);
        let (x0, x1) = ((c - d).max(lo), (c + d).min(hi));
        if x0 < x1 {
            match out.last_mut() {
                Some(last) if last.1 >= x0 => last.1 = last.1.max(x1),
                _ => out.push((x0, x1)),
            }
        }
    }
    out
}

/// Solutions of `a cos t + b sin t = tau` strictly inside `(lo, hi)`, sorted.
pub(crate) fn crossings(a: f64, b: f64, tau: f64, lo: f64, hi: f64) -> Vec<f64> {
    let r = a.hypot(b);
    if r == 0.0 || (tau / r).abs() >= 1.0 {
        return Vec::new();
    }
    let (g, d) = (b.atan2(a), (tau / r).acos());
    let shift = ((lo - g) / TAU).floor() - 1.0;
    let mut out = Vec::new();
    for j in 0..4 {
        let c = g + TAU * (shift + j as f64);
        for x in [c - d, c + d] {
            if lo < x && x < hi {
                out.push(x);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

pub(crate) fn intersect(x: &[(f64, f64)], y: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        let (lo, hi) = (x[i].0.max(y[j].0), x[i].1.min(y[j].1));
        if lo < hi {
            out.push((lo, hi));
        }
        if x[i].1 < y[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Parameter intervals of the arc lying in every cap.
pub(crate) fn arc_intervals(arc: &Arc, caps: &[Cap]) -> Vec<(f64, f64)> {
    let mut iv = vec![(0.0, arc.angle)];
    for cap in caps {
        let s = superlevel(arc.start.dot(&cap.c), arc.ortho.dot(&cap.c), cap.tau, 0.0, arc.angle);
        iv = intersect(&iv, &s);
    }
    iv
}

/// `I[a][b] = int_{t0}^{t1} cos^a sin^b` for `a + b <= n`.
fn trig_integrals(t0: f64, t1: f64, n: usize) -> Vec<Vec<f64>> {
    let (c0, s0, c1, s1) = (t0.cos(), t0.sin(), t1.cos(), t1.sin());
    let bracket = |a: usize, b: usize| c1.powi(a as i32) * s1.powi(b as i32) - c0.powi(a as i32) * s0.powi(b as i32);
    let mut t = vec![vec![0.0; n + 1]; n + 1];
    for deg in 0..=n {
        for a in 0..=deg {
            let b = deg - a;
            let (af, bf, df) = (a as f64, b as f64, deg as f64);
            t[a][b] = match (a, b) {
                (0, 0) => t1 - t0,
                (1, 0) => s1 - s0,
                (0, 1) => -(c1 - c0),
                (1, 1) => 0.5 * (s1 * s1 - s0 * s0),
                _ if a >= 2 => bracket(a - 1, b + 1) / df + (af - 1.0) / df * t[a - 2][b],
                _ => -bracket(a + 1, b - 1) / df + (bf - 1.0) / df * t[a][b - 2],
            };
        }
    }
    t
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `int_{t0}^{t1} u(t)^s (x) extra(u(t)) dt` from trigonometric antiderivatives.
pub fn arc_moment_closed(dim: usize, arc: &Arc, s: usize, extra: &Extra, t0: f64, t1: f64) -> SymTensor {
    let (p, q) = (arc.start, arc.ortho);
    let table = trig_integrals(t0, t1, s + 1);
    let pp: Vec<SymTensor> = (0..=s).map(|k| vector_power(dim, &p, k)).collect();
    let qq: Vec<SymTensor> = (0..=s).map(|k| vector_power(dim, &q, k)).collect();
    let ends = match extra {
        Extra::None => None,
        _ => Some((
            SymTensor::vector(dim, &extra.apply(&p).expect("extra")),
            SymTensor::vector(dim, &extra.apply(&q).expect("extra")),
        )),
    };
    let mut out = SymTensor::zeros(dim, s + extra.rank());
    for i in 0..=s {
        let term = pp[s - i].product_unchecked(&qq[i]).scaled(binomial(s, i));
        match &ends {
            None => out.axpy(table[s - i][i], &term),
            Some((ep, eq)) => {
                out.axpy(table[s - i + 1][i], &term.product_unchecked(ep));
                out.axpy(table[s - i][i + 1], &term.product_unchecked(eq));
            }
        }
    }
    out
}

/// Gauss-Legendre approximation of the weighted arc integral over `[t0, t1]`.
#[allow(clippy::too_many_arguments)]
pub fn arc_moment_gl(
    dim: usize,
    arc: &Arc,
    s: usize,
    extra: &Extra,
    weight: &WeightFn,
    t0: f64,
    t1: f64,
    order: usize,
) -> SymTensor {
    integrate(t0, t1, order, SymTensor::zeros(dim, s + extra.rank()), |t, w| {
        let u = arc.point(t);
        integrand(dim, &u, s, extra).scaled(w * weight.eval(&u))
    })
}

pub const ARC_GL_ORDER: usize = 64;

/// `int_{arc cap caps} f(u) u^s (x) extra(u) dH^1(u)`.
///
/// Cap boundaries and the kinks of a bump weight are located exactly; flat
/// parts of the weight are integrated in closed form.
pub fn arc_moment(dim: usize, arc: &Arc, s: usize, extra: &Extra, caps: &[Cap], weight: &WeightFn) -> SymTensor {
    let mut out = SymTensor::zeros(dim, s + extra.rank());
    if weight.is_zero() {
        return out;
    }
    for (lo, hi) in arc_intervals(arc, caps) {
        match weight {
            WeightFn::One => out += &arc_moment_closed(dim, arc, s, extra, lo, hi),
            WeightFn::Zero => {}
            WeightFn::Bump { pole, tau0, tau1 } => {
                let (a, b) = (arc.start.dot(pole), arc.ortho.dot(pole));
                let mut cuts = vec![lo];
                cuts.extend(crossings(a, b, *tau0, lo, hi));
                cuts.extend(crossings(a, b, *tau1, lo, hi));
                cuts.push(hi);
                cuts.sort_by(f64::total_cmp);
                for w in cuts.windows(2) {
                    if w[1] <= w[0] {
                        continue;
                    }
                    let m = 0.5 * (w[0] + w[1]);
                    let level = a * m.cos() + b * m.sin();
                    if level <= *tau0 {
                        continue;
                    } else if level >= *tau1 {
                        out += &arc_moment_closed(dim, arc, s, extra, w[0], w[1]);
                    } else {
                        out += &arc_moment_gl(dim, arc, s, extra, weight, w[0], w[1], ARC_GL_ORDER);
                    }
                }
            }
        }
    }
    out
}
