use serde_json::{Map, Value};

use super::{multi_indices, SymTensor};
use crate::error::{Error, Result};

fn key(dim: usize, alpha: &[usize; 3]) -> String {
    if dim == 2 {
        format!("({},{})", alpha[0], alpha[1])
    } else {
        format!("({},{},{})", alpha[0], alpha[1], alpha[2])
    }
}

fn parse_key(dim: usize, s: &str) -> Result<[usize; 3]> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("malformed multi-index key {s:?}")))?;
    let parts: Vec<usize> = inner
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(format!("multi-index key {s:?}: {e}")))?;
    if parts.len() != dim {
        return Err(Error::Parse(format!("multi-index key {s:?} has {} entries, expected {dim}", parts.len())));
    }
    let mut alpha = [0; 3];
    alpha[..dim].copy_from_slice(&parts);
    Ok(alpha)
}

/// `{"dim": n, "rank": p, "coeffs": {"(a,b,c)": value, ...}}`, zeros omitted.
pub fn tensor_to_json(t: &SymTensor) -> Value {
    let mut coeffs = Map::new();
    for (alpha, c) in multi_indices(t.dim(), t.rank()).iter().zip(t.coeffs()) {
        if *c != 0.0 {
            coeffs.insert(key(t.dim(), alpha), Value::from(*c));
        }
    }
    let mut obj = Map::new();
    obj.insert("dim".into(), Value::from(t.dim()));
    obj.insert("rank".into(), Value::from(t.rank()));
    obj.insert("coeffs".into(), Value::Object(coeffs));
    Value::Object(obj)
}

pub fn tensor_from_json(v: &Value) -> Result<SymTensor> {
    let field = |name: &str| v.get(name).ok_or_else(|| Error::Parse(format!("tensor: missing field {name:?}")));
    let dim = field("dim")?
        .as_u64()
        .ok_or_else(|| Error::Parse("tensor: dim must be an integer".into()))? as usize;
    let rank = field("rank")?
        .as_u64()
        .ok_or_else(|| Error::Parse("tensor: rank must be an integer".into()))? as usize;
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let coeffs = field("coeffs")?
        .as_object()
        .ok_or_else(|| Error::Parse("tensor: coeffs must be an object".into()))?;
    let mut t = SymTensor::zeros(dim, rank);
    for (k, val) in coeffs {
        let alpha = parse_key(dim, k)?;
        if alpha.iter().sum::<usize>() != rank {
            return Err(Error::Parse(format!("multi-index {k} does not have degree {rank}")));
        }
        let c = val
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("coefficient for {k} is not a number")))?;
        t.set_coeff(&alpha, c);
    }
    Ok(t)
}

impl SymTensor {
    pub fn to_json(&self) -> Value {
        tensor_to_json(self)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        tensor_from_json(v)
    }
}
