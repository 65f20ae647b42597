use serde_json::{json, Value};

use super::Polytope;
use crate::error::{Error, Result};
use crate::tensor::Vec3;

impl Polytope {
    /// `{"dim": n, "vertices": [[x, y(, z)], ...]}`
    pub fn to_json(&self) -> Value {
        let verts: Vec<Value> = self
            .vertices()
            .iter()
            .map(|v| if self.dim() == 2 { json!([v.x, v.y]) } else { json!([v.x, v.y, v.z]) })
            .collect();
        json!({"dim": self.dim(), "vertices": verts})
    }

    /// Reads a point set and returns its hull.
    pub fn from_json(v: &Value) -> Result<Polytope> {
        let dim = v
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("polytope: missing integer field \"dim\"".into()))? as usize;
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let arr = v
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("polytope: missing array field \"vertices\"".into()))?;
        let mut pts = Vec::with_capacity(arr.len());
        for (i, p) in arr.iter().enumerate() {
            let c = p
                .as_array()
                .filter(|c| c.len() == dim)
                .ok_or_else(|| Error::Parse(format!("polytope: vertex {i} must have {dim} coordinates")))?;
            let mut q = Vec3::zeros();
            for (k, x) in c.iter().enumerate() {
                q[k] = x
                    .as_f64()
                    .ok_or_else(|| Error::Parse(format!("polytope: vertex {i} coordinate {k} is not a number")))?;
            }
            pts.push(q);
        }
        Polytope::hull(dim, &pts)
    }

    /// Object File Format; only the vertex block is used on input.
    pub fn from_off(text: &str) -> Result<Polytope> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or_else(|| Error::Parse("OFF: empty input".into()))?;
        let mut counts_line = None;
        if header != "OFF" {
            match header.strip_prefix("OFF") {
                Some(rest) if !rest.trim().is_empty() => counts_line = Some((ln, rest.trim())),
                _ => return Err(Error::Parse(format!("OFF line {ln}: expected header \"OFF\""))),
            }
        }
        let (ln, counts) = match counts_line {
            Some(c) => c,
            None => lines.next().ok_or_else(|| Error::Parse("OFF: missing counts line".into()))?,
        };
        let nv: usize = counts
            .split_whitespace()
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("OFF line {ln}: bad vertex count")))?;
        let mut pts = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = lines.next().ok_or_else(|| Error::Parse("OFF: truncated vertex list".into()))?;
            let c: Vec<f64> = l
                .split_whitespace()
                .take(3)
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("OFF line {ln}: {e}")))?;
            if c.len() != 3 {
                return Err(Error::Parse(format!("OFF line {ln}: expected 3 coordinates")));
            }
            pts.push(Vec3::new(c[0], c[1], c[2]));
        }
        Polytope::hull(3, &pts)
    }

    pub fn to_off(&self) -> String {
        let mut s = format!("OFF\n{} {} 0\n", self.vertices().len(), self.facets().len());
        for v in self.vertices() {
            s.push_str(&format!("{} {} {}\n", v.x, v.y, v.z));
        }
        for f in self.facets() {
            s.push_str(&f.vertices.len().to_string());
            for i in &f.vertices {
                s.push_str(&format!(" {i}"));
            }
            s.push('\n');
        }
        s
    }
}
