use serde_json::{json, Value};

use super::region::{vec_from_json, Cap};
use crate::error::{Error, Result};
use crate::tensor::{Rotation, Vec3};

/// Continuous weight `S^{n-1} -> [0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightFn {
    One,
    Zero,
    /// `g(<u, pole>)` with a cosine taper: 0 below `tau0`, 1 above `tau1`.
    Bump { pole: Vec3, tau0: f64, tau1: f64 },
}

impl WeightFn {
    pub fn bump(pole: Vec3, tau0: f64, tau1: f64) -> Result<WeightFn> {
        let n = pole.norm();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!("bump pole must be a unit vector, has norm {n}")));
        }
        if !(-1.0 <= tau0 && tau0 < tau1 && tau1 <= 1.0) {
            return Err(Error::InvalidSpec(format!("bump needs -1 <= tau0 < tau1 <= 1, got {tau0}, {tau1}")));
        }
        Ok(WeightFn::Bump { pole: pole / n, tau0, tau1 })
    }

    pub fn eval(&self, u: &Vec3) -> f64 {
        match self {
            WeightFn::One => 1.0,
            WeightFn::Zero => 0.0,
            WeightFn::Bump { pole, tau0, tau1 } => taper(u.dot(pole), *tau0, *tau1),
        }
    }

    /// Closed cap containing the support; `None` for the whole sphere.
    pub fn support(&self) -> Option<Cap> {
        match self {
            WeightFn::One => None,
            WeightFn::Zero => Some(Cap { c: Vec3::z(), tau: 2.0 }),
            WeightFn::Bump { pole, tau0, .. } => Some(Cap { c: *pole, tau: *tau0 }),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, WeightFn::Zero)
    }

    pub fn rotated(&self, rot: &Rotation) -> WeightFn {
        match self {
            WeightFn::Bump { pole, tau0, tau1 } => WeightFn::Bump { pole: rot.apply(pole), tau0: *tau0, tau1: *tau1 },
            w => w.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            WeightFn::One => json!({"const": 1}),
            WeightFn::Zero => json!({"const": 0}),
            WeightFn::Bump { pole, tau0, tau1 } => {
                json!({"bump": {"pole": [pole.x, pole.y, pole.z], "tau0": tau0, "tau1": tau1}})
            }
        }
    }

    /// `{"const": 0|1}` or `{"bump": {"pole": [..], "tau0": a, "tau1": b}}`.
    pub fn from_json(v: &Value) -> Result<WeightFn> {
        if let Some(c) = v.get("const") {
            return match c.as_f64() {
                Some(1.0) => Ok(WeightFn::One),
                Some(0.0) => Ok(WeightFn::Zero),
                _ => Err(Error::Parse("weight: \"const\" must be 0 or 1".into())),
            };
        }
        let b = v.get("bump").ok_or_else(|| Error::Parse("weight: expected \"const\" or \"bump\"".into()))?;
        let pole = vec_from_json(b.get("pole").ok_or_else(|| Error::Parse("weight: bump needs \"pole\"".into()))?)?;
        let num = |k: &str| {
            b.get(k).and_then(Value::as_f64).ok_or_else(|| Error::Parse(format!("weight: bump needs numeric \"{k}\"")))
        };
        WeightFn::bump(pole, num("tau0")?, num("tau1")?)
    }
}

pub(crate) fn taper(t: f64, tau0: f64, tau1: f64) -> f64 {
    if t <= tau0 {
        0.0
    } else if t >= tau1 {
        1.0
    } else {
        0.5 * (1.0 - (std::f64::consts::PI * (t - tau0) / (tau1 - tau0)).cos())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_values() {
        let f = WeightFn::bump(-Vec3::z(), 0.5, 0.75).unwrap();
        assert_eq!(f.eval(&-Vec3::z()), 1.0);
        assert_eq!(f.eval(&Vec3::x()), 0.0);
        let u = Vec3::new((1.0 - 0.625f64 * 0.625).sqrt(), 0.0, -0.625);
        assert!((f.eval(&u) - 0.5).abs() < 1e-15);
        assert_eq!(WeightFn::from_json(&f.to_json()).unwrap(), f);
        assert!(WeightFn::bump(Vec3::z(), 0.5, 0.5).is_err());
    }
}
