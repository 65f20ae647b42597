use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use minktensor::approx::{default_bump, tilted_bump};
use minktensor::geometry::Polytope;
use minktensor::spherical::{RegionSpec, WeightFn};
use minktensor::tensor::Vec3;
use minktensor::valuations::FunctionalSpec;
use serde_json::Value;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_json(text: &str, origin: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| anyhow!(minktensor::Error::Parse(format!("{origin}: {e}"))))
}

/// Inline JSON, a JSON file, or `None` when `arg` is neither.
fn json_arg(arg: &str) -> Result<Option<Value>> {
    let t = arg.trim();
    if t.starts_with('{') {
        return parse_json(t, "inline JSON").map(Some);
    }
    let path = Path::new(t);
    if path.is_file() {
        return parse_json(&read(path)?, &path.display().to_string()).map(Some);
    }
    Ok(None)
}

pub fn polytope(path: &Path) -> Result<Polytope> {
    let text = read(path)?;
    let is_off = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("off"))
        || text.trim_start().starts_with("OFF");
    let p = if is_off {
        Polytope::from_off(&text)
    } else {
        Polytope::from_json(&parse_json(&text, &path.display().to_string())?)
    };
    p.with_context(|| format!("in {}", path.display()))
}

pub fn functional(arg: &str) -> Result<FunctionalSpec> {
    Ok(match json_arg(arg)? {
        Some(v) => FunctionalSpec::from_json(&v)?,
        None => FunctionalSpec::parse(arg)?,
    })
}

pub fn region(arg: &str) -> Result<RegionSpec> {
    if arg.trim().eq_ignore_ascii_case("full") {
        return Ok(RegionSpec::Full);
    }
    match json_arg(arg)? {
        Some(v) => Ok(RegionSpec::from_json(&v)?),
        None => bail!(minktensor::Error::Parse(format!("region {arg:?}: expected \"full\", JSON or a file"))),
    }
}

fn key_values(body: &str) -> Result<Vec<(String, f64)>> {
    body.split(',')
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!(minktensor::Error::Parse(format!("expected key=value, got {kv:?}"))))?;
            let x = v.trim().parse::<f64>().map_err(|_| anyhow!(minktensor::Error::Parse(format!("{k}: {v:?} is not a number"))))?;
            Ok((k.trim().to_string(), x))
        })
        .collect()
}

pub fn weight(arg: &str) -> Result<WeightFn> {
    let t = arg.trim();
    match t {
        "const1" | "one" => return Ok(WeightFn::One),
        "const0" | "zero" => return Ok(WeightFn::Zero),
        _ => {}
    }
    if let Some(body) = t.strip_prefix("bump:") {
        let kv = key_values(body)?;
        let get = |name: &str| kv.iter().find(|(k, _)| k == name).map(|(_, v)| *v);
        if let Some((k, _)) = kv.iter().find(|(k, _)| k != "h" && k != "tilt") {
            bail!(minktensor::Error::Parse(format!("bump: unknown parameter {k:?}")));
        }
        let h = get("h").ok_or_else(|| anyhow!(minktensor::Error::Parse("bump: missing h".into())))?;
        return Ok(match get("tilt") {
            Some(a) => tilted_bump(h, a)?,
            None => default_bump(h)?,
        });
    }
    match json_arg(t)? {
        Some(v) => Ok(WeightFn::from_json(&v)?),
        None => bail!(minktensor::Error::Parse(format!("weight {arg:?}: expected const1, const0, bump:h=.., JSON or a file"))),
    }
}

/// `a=x,y` or `x,y`.
pub fn frame(arg: &str) -> Result<Vec3> {
    let body = arg.trim().strip_prefix("a=").unwrap_or(arg.trim());
    let xs: Vec<f64> = body
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| anyhow!(minktensor::Error::Parse(format!("frame {arg:?}: expected a=x,y"))))?;
    match xs.as_slice() {
        [x, y] => {
            let v = Vec3::new(*x, *y, 0.0);
            if v.norm() == 0.0 {
                bail!(minktensor::Error::InvalidParams("frame vector must be nonzero".into()));
            }
            Ok(v.normalize())
        }
        _ => bail!(minktensor::Error::Parse(format!("frame {arg:?}: expected two components"))),
    }
}
