use serde_json::{json, Value};

use super::{ell, ApproxParams, Approximant};
use crate::error::Result;
use crate::geometry::NormalCone;
use crate::spherical::{Cap, WeightFn};
use crate::tensor::Vec3;

const ARC_SAMPLES: usize = 33;

/// Outcome of the three assumptions; a margin is the worst slack of its
/// inequality and is non-negative exactly when the inequality holds.
#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport {
    pub eps: f64,
    pub a: bool,
    pub b: bool,
    pub c: bool,
    /// `min <u, -e3> - (1 - eps)` over `supp f`.
    pub height_margin: f64,
    /// `eps - max |<u, a>|`.
    pub planar_margin: f64,
    pub touched_edges: usize,
    /// Touched edges outside every lattice class.
    pub unclassified: usize,
    /// `eps - max |<v_F - l_r, a>|`.
    pub direction_margin: f64,
    /// `eps - max |<v_F x u - l_r x (-e3), a>|`.
    pub cross_margin: f64,
}

impl AssumptionReport {
    pub fn all(&self) -> bool {
        self.a && self.b && self.c
    }

    pub fn to_json(&self) -> Value {
        json!({
            "eps": self.eps,
            "A": self.a,
            "B": self.b,
            "C": self.c,
            "height_margin": self.height_margin,
            "planar_margin": self.planar_margin,
            "touched_edges": self.touched_edges,
            "unclassified": self.unclassified,
            "direction_margin": self.direction_margin,
            "cross_margin": self.cross_margin,
        })
    }
}

fn planar(v: &Vec3) -> f64 {
    v.xy().norm()
}

/// Range of the polar angle from `-e3` over a closed cap.
fn cap_polar_range(cap: &Cap) -> (f64, f64) {
    let alpha = cap.c.dot(&-Vec3::z()).clamp(-1.0, 1.0).acos();
    let radius = cap.tau.clamp(-1.0, 1.0).acos();
    ((alpha - radius).max(0.0), (alpha + radius).min(std::f64::consts::PI))
}

pub fn check_assumptions(approx: &Approximant, weight: &WeightFn, eps: f64) -> AssumptionReport {
    let p = &approx.polytope;
    let (height_margin, planar_margin) = match weight {
        WeightFn::Zero => (f64::INFINITY, f64::INFINITY),
        _ => {
            let (lo, hi) = weight.support().map_or((0.0, std::f64::consts::PI), |c| cap_polar_range(&c));
            let max_sin = if lo <= std::f64::consts::FRAC_PI_2 && hi >= std::f64::consts::FRAC_PI_2 { 1.0 } else { lo.sin().max(hi.sin()) };
            (hi.cos() - (1.0 - eps), eps - max_sin)
        }
    };
    let touched = approx.touched_edges(weight);
    let support = weight.support();
    let mut unclassified = 0;
    let (mut dir_worst, mut cross_worst) = (0.0f64, 0.0f64);
    for &i in &touched {
        let (r, v) = match (approx.classes[i], approx.canonical_edge_vector(i)) {
            (Some(r), Some(v)) => (r, v),
            _ => {
                unclassified += 1;
                continue;
            }
        };
        let l = ell(approx.params.n, r);
        dir_worst = dir_worst.max(planar(&(v - l)));
        let target = l.cross(&-Vec3::z());
        if let NormalCone::Arc(arc) = p.normal_cone(1, i) {
            let caps: Vec<Cap> = support.iter().cloned().collect();
            for (t0, t1) in crate::spherical::arc_intervals(&arc, &caps) {
                for k in 0..ARC_SAMPLES {
                    let u = arc.point(t0 + (t1 - t0) * k as f64 / (ARC_SAMPLES - 1) as f64);
                    cross_worst = cross_worst.max(planar(&(v.cross(&u) - target)));
                }
            }
        }
    }
    let (direction_margin, cross_margin) = (eps - dir_worst, eps - cross_worst);
    AssumptionReport {
        eps,
        a: height_margin > 0.0 && planar_margin >= 0.0,
        b: unclassified == 0,
        c: direction_margin >= 0.0 && cross_margin >= 0.0,
        height_margin,
        planar_margin,
        touched_edges: touched.len(),
        unclassified,
        direction_margin,
        cross_margin,
    }
}

/// Trace of the parameter search: every `(h, t)` tried, ending at the first
/// pair passing all three assumptions when `found` is set.
#[derive(Clone, Debug)]
pub struct ParameterSearch {
    pub found: bool,
    pub steps: Vec<(ApproxParams, AssumptionReport)>,
}

impl ParameterSearch {
    pub fn last(&self) -> Option<&(ApproxParams, AssumptionReport)> {
        self.steps.last()
    }
}

/// Shrinks `h` (with `t` in proportion) while A or C fails, then `t` while B
/// fails, using the default bump for each `h`.
pub fn find_parameters(n: usize, eps: f64, h0: f64, t0: f64, max_steps: usize) -> Result<ParameterSearch> {
    let (mut h, mut t) = (h0, t0.min(h0.sqrt()));
    let mut steps = Vec::new();
    for _ in 0..max_steps {
        let params = ApproxParams::new(n, h, t)?;
        let approx = Approximant::build(&params)?;
        let report = check_assumptions(&approx, &super::default_bump(h)?, eps);
        let (pass, a, c) = (report.all(), report.a, report.c);
        steps.push((params, report));
        if pass {
            return Ok(ParameterSearch { found: true, steps });
        }
        if !a || !c {
            h *= 0.5;
            t *= std::f64::consts::FRAC_1_SQRT_2;
        } else {
            t *= 0.5;
        }
    }
    Ok(ParameterSearch { found: false, steps })
}
