use rayon::prelude::*;
use serde_json::{json, Value};

use super::{ApproxParams, Approximant};
use crate::error::{Error, Result};
use crate::spherical::{RegionSpec, WeightFn};
use crate::tensor::{tensor_to_json, Rotation, SymTensor, Vec3};
use crate::valuations::{evaluate, w1, Functional, FunctionalSpec};

/// One convergence run: `spec` weighted by `weight` on `P^N_{h,t}` along
/// the ladder `ts`, applied to the frame `(a, .., a, -e3, .., -e3)`.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub spec: FunctionalSpec,
    pub n: usize,
    pub h: f64,
    pub ts: Vec<f64>,
    pub weight: WeightFn,
    pub a: Vec3,
    /// Number of trailing `-e3` arguments; defaults to the `s` index.
    pub trailing: Option<usize>,
    /// Angle of the rotation about `e3` applied to `a` for `D(t)`.
    pub angle: f64,
    pub serial: bool,
}

impl Experiment {
    pub fn new(spec: FunctionalSpec, h: f64, weight: WeightFn) -> Experiment {
        Experiment {
            spec,
            n: 2,
            h,
            ts: vec![0.2, 0.1, 0.05, 0.025],
            weight,
            a: Vec3::x(),
            trailing: None,
            angle: std::f64::consts::FRAC_PI_8,
            serial: false,
        }
    }

    fn trailing(&self) -> usize {
        self.trailing.unwrap_or(match self.spec.kind {
            Functional::Phi { s, .. } | Functional::PhiTilde3 { s, .. } | Functional::PhiTilde2 { s, .. } => s,
            _ => 0,
        })
    }

    pub fn frame(&self, a: &Vec3) -> Result<Vec<Vec3>> {
        let p = self.spec.rank();
        let i = self.trailing();
        if i > p {
            return Err(Error::InvalidParams(format!("{i} trailing arguments exceed rank {p}")));
        }
        let a = Vec3::new(a.x, a.y, 0.0);
        if (a.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParams("frame vector must be a unit vector in the plane z = 0".into()));
        }
        Ok((0..p).map(|k| if k < p - i { a } else { -Vec3::z() }).collect())
    }
}

#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub t: f64,
    pub tensor: SymTensor,
    /// Frame value `v(t)`.
    pub value: f64,
    /// Frame value with `a` rotated.
    pub value_rotated: f64,
    pub w1: f64,
    /// `D(t) = v_theta(t) - v(t)`.
    pub discrepancy: f64,
    /// `v(t_k) - v(t_{k-1})`.
    pub difference: Option<f64>,
    /// Ratio of successive differences.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceTable {
    pub spec: FunctionalSpec,
    pub n: usize,
    pub h: f64,
    pub angle: f64,
    pub rows: Vec<ConvergenceRow>,
    /// First-order extrapolation from the two finest rows.
    pub limit_tensor: Option<SymTensor>,
    pub limit_value: Option<f64>,
}

/// First-order Richardson estimate from values at `coarse > fine`.
pub fn richardson(t_coarse: f64, v_coarse: f64, t_fine: f64, v_fine: f64) -> f64 {
    let q = t_coarse / t_fine;
    (q * v_fine - v_coarse) / (q - 1.0)
}

fn richardson_tensor(t_coarse: f64, coarse: &SymTensor, t_fine: f64, fine: &SymTensor) -> SymTensor {
    let q = t_coarse / t_fine;
    let mut out = fine.scaled(q / (q - 1.0));
    out.axpy(-1.0 / (q - 1.0), coarse);
    out
}

pub fn convergence_experiment(exp: &Experiment) -> Result<ConvergenceTable> {
    exp.spec.validate(3)?;
    if exp.spec.is_global() {
        return Err(Error::InvalidSpec(format!("{} is a total value and cannot be weighted", exp.spec)));
    }
    let mut ts = exp.ts.clone();
    ts.sort_by(|a, b| b.total_cmp(a));
    let frame = exp.frame(&exp.a)?;
    let rot = Rotation::about_axis(&Vec3::z(), exp.angle);
    let frame_rot = exp.frame(&rot.apply(&exp.a))?;
    let run = |t: &f64| -> Result<(SymTensor, f64)> {
        let approx = Approximant::build(&ApproxParams::new(exp.n, exp.h, *t)?)?;
        let tensor = evaluate(&approx.polytope, &exp.spec, &RegionSpec::Full, &exp.weight)?;
        Ok((tensor, w1(&approx.polytope, &exp.weight)?))
    };
    let results: Vec<(SymTensor, f64)> = if exp.serial {
        ts.iter().map(run).collect::<Result<_>>()?
    } else {
        ts.par_iter().map(run).collect::<Result<_>>()?
    };
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(ts.len());
    for (t, (tensor, w)) in ts.iter().zip(results) {
        let value = tensor.eval(&frame)?;
        let value_rotated = tensor.eval(&frame_rot)?;
        let difference = rows.last().map(|prev| value - prev.value);
        let ratio = match (difference, rows.last().and_then(|r| r.difference)) {
            (Some(d), Some(prev)) if prev != 0.0 => Some((d / prev).abs()),
            _ => None,
        };
        rows.push(ConvergenceRow { t: *t, tensor, value, value_rotated, w1: w, discrepancy: value_rotated - value, difference, ratio });
    }
    let (limit_tensor, limit_value) = match rows.as_slice() {
        [.., c, f] => (
            Some(richardson_tensor(c.t, &c.tensor, f.t, &f.tensor)),
            Some(richardson(c.t, c.value, f.t, f.value)),
        ),
        _ => (None, None),
    };
    Ok(ConvergenceTable { spec: exp.spec, n: exp.n, h: exp.h, angle: exp.angle, rows, limit_tensor, limit_value })
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v:.12e}"))
}

impl ConvergenceTable {
    /// `min_t W_1(P^N_{h,t}, f) / N`.
    pub fn w1_floor(&self) -> f64 {
        self.rows.iter().map(|r| r.w1 / self.n as f64).fold(f64::INFINITY, f64::min)
    }

    pub fn max_discrepancy(&self) -> f64 {
        self.rows.iter().map(|r| r.discrepancy.abs()).fold(0.0, f64::max)
    }

    pub fn min_discrepancy(&self) -> f64 {
        self.rows.iter().map(|r| r.discrepancy.abs()).fold(f64::INFINITY, f64::min)
    }

    /// `|D|` at the finest and the coarsest `t`.
    pub fn discrepancy_ends(&self) -> Option<(f64, f64)> {
        Some((self.rows.last()?.discrepancy.abs(), self.rows.first()?.discrepancy.abs()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value,value_rotated,W1,D,difference,ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e},{:.12e},{},{}\n",
                r.t,
                r.value,
                r.value_rotated,
                r.w1,
                r.discrepancy,
                opt(r.difference),
                opt(r.ratio)
            ));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "t": r.t,
                    "value": r.value,
                    "value_rotated": r.value_rotated,
                    "W1": r.w1,
                    "D": r.discrepancy,
                    "difference": r.difference,
                    "ratio": r.ratio,
                    "tensor": tensor_to_json(&r.tensor),
                })
            })
            .collect();
        json!({
            "functional": self.spec.to_json(),
            "N": self.n,
            "h": self.h,
            "angle": self.angle,
            "rows": rows,
            "limit_value": self.limit_value,
            "limit_tensor": self.limit_tensor.as_ref().map(tensor_to_json),
            "W1_floor": self.w1_floor(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_linear_term() {
        let v = |t: f64| 2.0 + 3.0 * t;
        assert!((richardson(0.1, v(0.1), 0.05, v(0.05)) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn frame_layout() {
        let exp = Experiment::new(FunctionalSpec::parse("PhiTilde3(0,1,0)").unwrap(), 0.5, WeightFn::One);
        let f = exp.frame(&Vec3::x()).unwrap();
        assert_eq!(f, vec![Vec3::x(), Vec3::x(), -Vec3::z()]);
        assert!(exp.frame(&Vec3::z()).is_err());
    }
}
