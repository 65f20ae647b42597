use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::tensor::{Rotation, Vec3};

/// Spherical cap `{u : <u, c> >= tau}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cap {
    pub c: Vec3,
    pub tau: f64,
}

impl Cap {
    pub fn new(c: Vec3, tau: f64) -> Result<Cap> {
        let n = c.norm();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!("cap centre must be a unit vector, has norm {n}")));
        }
        if !(-1.0..=1.0).contains(&tau) {
            return Err(Error::InvalidSpec(format!("cap threshold {tau} outside [-1, 1]")));
        }
        Ok(Cap { c: c / n, tau })
    }

    pub fn contains(&self, u: &Vec3) -> bool {
        u.dot(&self.c) >= self.tau
    }

    pub fn rotated(&self, rot: &Rotation) -> Cap {
        Cap { c: rot.apply(&self.c), tau: self.tau }
    }
}

/// `{x : lo <= <w, x> <= hi}`; infinite bounds are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct Slab {
    pub w: Vec3,
    pub lo: f64,
    pub hi: f64,
}

impl Slab {
    pub fn contains(&self, x: &Vec3) -> bool {
        let t = self.w.dot(x);
        self.lo <= t && t <= self.hi
    }
}

/// Box in an orthonormal frame, as an intersection of slabs.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionBox {
    pub slabs: Vec<Slab>,
}

impl RegionBox {
    /// Axis-parallel box `lo <= x <= hi`.
    pub fn axis_aligned(lo: &[f64], hi: &[f64]) -> RegionBox {
        let slabs = lo
            .iter()
            .zip(hi)
            .enumerate()
            .map(|(i, (&lo, &hi))| {
                let mut w = Vec3::zeros();
                w[i] = 1.0;
                Slab { w, lo, hi }
            })
            .collect();
        RegionBox { slabs }
    }

    /// Cube of half-width `r` about `centre`.
    pub fn around(dim: usize, centre: &Vec3, r: f64) -> RegionBox {
        let lo: Vec<f64> = (0..dim).map(|i| centre[i] - r).collect();
        let hi: Vec<f64> = (0..dim).map(|i| centre[i] + r).collect();
        RegionBox::axis_aligned(&lo, &hi)
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        self.slabs.iter().all(|s| s.contains(x))
    }
}

/// One product set `box x cap`; a missing factor means no restriction.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegionTerm {
    pub bbox: Option<RegionBox>,
    pub cap: Option<Cap>,
}

impl RegionTerm {
    pub fn contains(&self, x: &Vec3, u: &Vec3) -> bool {
        self.bbox.as_ref().is_none_or(|b| b.contains(x)) && self.cap.as_ref().is_none_or(|c| c.contains(u))
    }
}

/// Borel set of support elements `(x, u)`: everything, or a finite union of
/// products of a box in `x` and a cap in `u`.
#[derive(Clone, Debug, PartialEq)]
pub enum RegionSpec {
    Full,
    Union(Vec<RegionTerm>),
}

/// Intersection of several terms: all slabs and all caps together.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProductPiece {
    pub slabs: Vec<Slab>,
    pub caps: Vec<Cap>,
}

const MAX_TERMS: usize = 16;

impl RegionSpec {
    pub fn cap(cap: Cap) -> RegionSpec {
        RegionSpec::Union(vec![RegionTerm { bbox: None, cap: Some(cap) }])
    }

    pub fn boxed(b: RegionBox) -> RegionSpec {
        RegionSpec::Union(vec![RegionTerm { bbox: Some(b), cap: None }])
    }

    pub fn contains(&self, x: &Vec3, u: &Vec3) -> bool {
        match self {
            RegionSpec::Full => true,
            RegionSpec::Union(ts) => ts.iter().any(|t| t.contains(x, u)),
        }
    }

    /// Inclusion-exclusion expansion `1_union = sum sign * 1_piece`.
    pub fn pieces(&self) -> Result<Vec<(f64, ProductPiece)>> {
        let terms = match self {
            RegionSpec::Full => return Ok(vec![(1.0, ProductPiece::default())]),
            RegionSpec::Union(ts) => ts,
        };
        if terms.len() > MAX_TERMS {
            return Err(Error::InvalidSpec(format!("region union has {} terms, at most {MAX_TERMS} supported", terms.len())));
        }
        let mut out = Vec::new();
        for mask in 1u32..(1 << terms.len()) {
            let mut piece = ProductPiece::default();
            for (i, t) in terms.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    if let Some(b) = &t.bbox {
                        piece.slabs.extend(b.slabs.iter().cloned());
                    }
                    if let Some(c) = &t.cap {
                        piece.caps.push(c.clone());
                    }
                }
            }
            let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
            out.push((sign, piece));
        }
        Ok(out)
    }

    /// Image under `(x, u) -> (rot x, rot u)`.
    pub fn rotated(&self, rot: &Rotation) -> RegionSpec {
        self.map_terms(|t| RegionTerm {
            bbox: t.bbox.as_ref().map(|b| RegionBox {
                slabs: b.slabs.iter().map(|s| Slab { w: rot.apply(&s.w), lo: s.lo, hi: s.hi }).collect(),
            }),
            cap: t.cap.as_ref().map(|c| c.rotated(rot)),
        })
    }

    /// Image under `(x, u) -> (x + t, u)`.
    pub fn translated(&self, t: &Vec3) -> RegionSpec {
        self.map_slabs(|s| {
            let d = s.w.dot(t);
            Slab { w: s.w, lo: s.lo + d, hi: s.hi + d }
        })
    }

    /// Image under `(x, u) -> (lambda x, u)`, `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> RegionSpec {
        self.map_slabs(|s| Slab { w: s.w, lo: s.lo * lambda, hi: s.hi * lambda })
    }

    fn map_slabs(&self, f: impl Fn(&Slab) -> Slab) -> RegionSpec {
        self.map_terms(|t| RegionTerm {
            bbox: t.bbox.as_ref().map(|b| RegionBox { slabs: b.slabs.iter().map(&f).collect() }),
            cap: t.cap.clone(),
        })
    }

    fn map_terms(&self, f: impl Fn(&RegionTerm) -> RegionTerm) -> RegionSpec {
        match self {
            RegionSpec::Full => RegionSpec::Full,
            RegionSpec::Union(ts) => RegionSpec::Union(ts.iter().map(f).collect()),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            RegionSpec::Full => json!({"full": true}),
            RegionSpec::Union(ts) => {
                let terms: Vec<Value> = ts
                    .iter()
                    .map(|t| {
                        let mut m = Map::new();
                        if let Some(b) = &t.bbox {
                            m.insert("box".into(), box_to_json(b));
                        }
                        if let Some(c) = &t.cap {
                            m.insert("cap".into(), json!({"c": [c.c.x, c.c.y, c.c.z], "tau": c.tau}));
                        }
                        Value::Object(m)
                    })
                    .collect();
                json!({ "union": terms })
            }
        }
    }

    /// Parses `{"full": true}` or `{"union": [{"box": .., "cap": ..}, ..]}`.
    /// A box is `{"lo": [..], "hi": [..]}` with optional `"axes"` (rows of an
    /// orthonormal frame); `null` bounds are unbounded.
    pub fn from_json(v: &Value) -> Result<RegionSpec> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("region: expected an object".into()))?;
        if obj.get("full").and_then(Value::as_bool) == Some(true) {
            return Ok(RegionSpec::Full);
        }
        let terms = obj
            .get("union")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("region: expected \"full\": true or a \"union\" array".into()))?;
        let mut out = Vec::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            let mut term = RegionTerm::default();
            if let Some(b) = t.get("box") {
                term.bbox = Some(box_from_json(b).map_err(|e| Error::Parse(format!("region term {i}: {e}")))?);
            }
            if let Some(c) = t.get("cap") {
                let centre = c.get("c").ok_or_else(|| Error::Parse(format!("region term {i}: cap needs \"c\"")))?;
                let centre = vec_from_json(centre).map_err(|e| Error::Parse(format!("region term {i}: {e}")))?;
                let tau = c
                    .get("tau")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| Error::Parse(format!("region term {i}: cap needs numeric \"tau\"")))?;
                term.cap = Some(Cap::new(centre, tau)?);
            }
            out.push(term);
        }
        Ok(RegionSpec::Union(out))
    }
}

fn bound_json(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn box_to_json(b: &RegionBox) -> Value {
    let axes: Vec<Value> = b.slabs.iter().map(|s| json!([s.w.x, s.w.y, s.w.z])).collect();
    let lo: Vec<Value> = b.slabs.iter().map(|s| bound_json(s.lo)).collect();
    let hi: Vec<Value> = b.slabs.iter().map(|s| bound_json(s.hi)).collect();
    json!({"axes": axes, "lo": lo, "hi": hi})
}

pub(crate) fn vec_from_json(v: &Value) -> Result<Vec3> {
    let a = v.as_array().filter(|a| (2..=3).contains(&a.len())).ok_or_else(|| Error::Parse("expected a 2- or 3-vector".into()))?;
    let mut out = Vec3::zeros();
    for (i, x) in a.iter().enumerate() {
        out[i] = x.as_f64().ok_or_else(|| Error::Parse(format!("vector entry {i} is not a number")))?;
    }
    Ok(out)
}

fn bounds(v: Option<&Value>, name: &str, default: f64) -> Result<Vec<f64>> {
    let a = v.and_then(Value::as_array).ok_or_else(|| Error::Parse(format!("box needs array \"{name}\"")))?;
    a.iter()
        .map(|x| match x {
            Value::Null => Ok(default),
            _ => x.as_f64().ok_or_else(|| Error::Parse(format!("box \"{name}\" entries must be numbers or null"))),
        })
        .collect()
}

fn box_from_json(v: &Value) -> Result<RegionBox> {
    let lo = bounds(v.get("lo"), "lo", f64::NEG_INFINITY)?;
    let hi = bounds(v.get("hi"), "hi", f64::INFINITY)?;
    if lo.len() != hi.len() || lo.is_empty() || lo.len() > 3 {
        return Err(Error::Parse("box \"lo\" and \"hi\" must have equal length 2 or 3".into()));
    }
    let axes: Vec<Vec3> = match v.get("axes") {
        None => (0..lo.len()).map(|i| Vec3::ith(i, 1.0)).collect(),
        Some(a) => a
            .as_array()
            .ok_or_else(|| Error::Parse("box \"axes\" must be an array".into()))?
            .iter()
            .map(vec_from_json)
            .collect::<Result<_>>()?,
    };
    if axes.len() != lo.len() {
        return Err(Error::Parse("box needs one axis per bound".into()));
    }
    for (i, a) in axes.iter().enumerate() {
        for (j, b) in axes.iter().enumerate() {
            let dev = (a.dot(b) - if i == j { 1.0 } else { 0.0 }).abs();
            if dev > 1e-9 {
                return Err(Error::NonOrthonormal(dev));
            }
        }
    }
    let slabs = axes.into_iter().zip(lo.into_iter().zip(hi)).map(|(w, (lo, hi))| Slab { w, lo, hi }).collect();
    Ok(RegionBox { slabs })
}

/// Part of a convex face (`k + 1` points for `k <= 1`, a cycle otherwise)
/// inside all slabs.
pub fn clip_face(k: usize, points: &[Vec3], slabs: &[Slab]) -> Vec<Vec3> {
    let mut pts = points.to_vec();
    for s in slabs {
        if s.hi.is_finite() {
            pts = clip_halfspace(k, &pts, &s.w, s.hi);
        }
        if s.lo.is_finite() {
            pts = clip_halfspace(k, &pts, &-s.w, -s.lo);
        }
        if pts.is_empty() {
            break;
        }
    }
    pts
}

/// Part of the face with `<w, x> <= c`.
fn clip_halfspace(k: usize, pts: &[Vec3], w: &Vec3, c: f64) -> Vec<Vec3> {
    let val = |p: &Vec3| w.dot(p) - c;
    if pts.is_empty() {
        return Vec::new();
    }
    match k {
        0 => pts.iter().filter(|p| val(p) <= 0.0).cloned().collect(),
        1 => {
            let (a, b) = (pts[0], pts[1]);
            let (fa, fb) = (val(&a), val(&b));
            match (fa <= 0.0, fb <= 0.0) {
                (true, true) => vec![a, b],
                (false, false) => Vec::new(),
                (true, false) => vec![a, a + (b - a) * (fa / (fa - fb))],
                (false, true) => vec![a + (b - a) * (fa / (fa - fb)), b],
            }
        }
        _ => {
            let n = pts.len();
            let mut out = Vec::with_capacity(n + 1);
            for i in 0..n {
                let (a, b) = (pts[i], pts[(i + 1) % n]);
                let (fa, fb) = (val(&a), val(&b));
                if fa <= 0.0 {
                    out.push(a);
                }
                if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
                    out.push(a + (b - a) * (fa / (fa - fb)));
                }
            }
            if out.len() < 3 {
                out.clear();
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let r = RegionSpec::Union(vec![
            RegionTerm { bbox: Some(RegionBox::axis_aligned(&[0.0, -1.0, f64::NEG_INFINITY], &[1.0, 2.0, 0.5])), cap: None },
            RegionTerm { bbox: None, cap: Some(Cap::new(Vec3::z(), 0.25).unwrap()) },
        ]);
        assert_eq!(RegionSpec::from_json(&r.to_json()).unwrap(), r);
        assert_eq!(RegionSpec::from_json(&json!({"full": true})).unwrap(), RegionSpec::Full);
        assert!(RegionSpec::from_json(&json!({"union": [{"cap": {"c": [2, 0, 0], "tau": 0}}]})).is_err());
    }

    #[test]
    fn pieces_follow_inclusion_exclusion() {
        let a = RegionTerm { bbox: None, cap: Some(Cap::new(Vec3::z(), 0.0).unwrap()) };
        let b = RegionTerm { bbox: Some(RegionBox::axis_aligned(&[0.0, 0.0], &[1.0, 1.0])), cap: None };
        let r = RegionSpec::Union(vec![a, b]);
        let p = r.pieces().unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.iter().map(|x| x.0).sum::<f64>(), 1.0);
        assert_eq!((p[2].1.slabs.len(), p[2].1.caps.len()), (2, 1));
    }

    #[test]
    fn clipping_square() {
        let sq = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 0.0), Vec3::new(0.0, 1.0, 0.0)];
        let b = RegionBox::axis_aligned(&[0.5, f64::NEG_INFINITY], &[2.0, f64::INFINITY]);
        let c = clip_face(2, &sq, &b.slabs);
        assert!((crate::geometry::moments::polygon_area(&c) - 0.5).abs() < 1e-15);
        let seg = clip_face(1, &sq[..2], &b.slabs);
        assert_eq!(seg, vec![Vec3::new(0.5, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)]);
        assert!(clip_face(0, &sq[..1], &b.slabs).is_empty());
    }
}
