use std::fmt;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

/// The tensor valuations that can be evaluated on polytopes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Functional {
    /// Generalized local Minkowski tensor, normalized by `1/(r! s! omega_{n-k+s})`.
    Phi { k: usize, r: usize, s: usize, j: usize },
    /// Edge functional in R^3 with factor `v_F^{2j+1} (v_F x u)`.
    PhiTilde3 { r: usize, s: usize, j: usize },
    /// Planar functional with factor `ubar` on the `k`-faces.
    PhiTilde2 { k: usize, r: usize, s: usize },
    /// Planar total `int x^r u^s` against the `k`-th support measure.
    GlobalPsi2 { k: usize, r: usize, s: usize },
    /// Planar area moment `int_P x^r`.
    GlobalPsi2Vol { r: usize },
    /// Total value of `PhiTilde2`.
    GlobalPhiTilde2 { k: usize, r: usize, s: usize },
    /// Total value of `PhiTilde3` with `j = 0`.
    GlobalT3 { r: usize, s: usize },
    /// `sum_F H^1(F) int_{nu(P,F)} f`.
    W1,
}

/// A functional multiplied by `Q^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FunctionalSpec {
    pub kind: Functional,
    pub m: usize,
}

impl From<Functional> for FunctionalSpec {
    fn from(kind: Functional) -> Self {
        FunctionalSpec { kind, m: 0 }
    }
}

impl FunctionalSpec {
    pub fn new(kind: Functional, m: usize) -> Self {
        FunctionalSpec { kind, m }
    }

    /// Ambient dimension the functional lives in, if it is fixed.
    pub fn required_dim(&self) -> Option<usize> {
        match self.kind {
            Functional::Phi { .. } => None,
            Functional::PhiTilde3 { .. } | Functional::GlobalT3 { .. } | Functional::W1 => Some(3),
            _ => Some(2),
        }
    }

    pub fn is_global(&self) -> bool {
        matches!(
            self.kind,
            Functional::GlobalPsi2 { .. }
                | Functional::GlobalPsi2Vol { .. }
                | Functional::GlobalPhiTilde2 { .. }
                | Functional::GlobalT3 { .. }
        )
    }

    /// Sign change under orientation-reversing maps.
    pub fn is_tilde(&self) -> bool {
        matches!(
            self.kind,
            Functional::PhiTilde3 { .. }
                | Functional::PhiTilde2 { .. }
                | Functional::GlobalPhiTilde2 { .. }
                | Functional::GlobalT3 { .. }
        )
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if let Some(d) = self.required_dim() {
            if d != dim {
                return Err(Error::InvalidSpec(format!("{self} is defined for n = {d} only, polytope has n = {dim}")));
            }
        }
        match self.kind {
            Functional::Phi { k, j, .. } => {
                if k >= dim {
                    return Err(Error::InvalidSpec(format!("{self}: need k in 0..={}", dim - 1)));
                }
                if k == 0 && j != 0 {
                    return Err(Error::InvalidSpec(format!("{self}: j must be 0 when k = 0")));
                }
            }
            Functional::PhiTilde2 { k, .. } | Functional::GlobalPsi2 { k, .. } | Functional::GlobalPhiTilde2 { k, .. }
                if k > 1 =>
            {
                return Err(Error::InvalidSpec(format!("{self}: need k in {{0, 1}}")));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        2 * self.m
            + match self.kind {
                Functional::Phi { r, s, j, .. } => 2 * j + r + s,
                Functional::PhiTilde3 { r, s, j } => 2 * j + r + s + 2,
                Functional::PhiTilde2 { r, s, .. } | Functional::GlobalPhiTilde2 { r, s, .. } => r + s + 1,
                Functional::GlobalPsi2 { r, s, .. } => r + s,
                Functional::GlobalPsi2Vol { r } => r,
                Functional::GlobalT3 { r, s } => r + s + 2,
                Functional::W1 => 0,
            }
    }

    /// Degree of homogeneity under `(P, eta) -> (lambda P, lambda eta)`.
    pub fn homogeneity(&self) -> usize {
        match self.kind {
            Functional::Phi { k, r, .. } => k + r,
            Functional::PhiTilde3 { r, .. } | Functional::GlobalT3 { r, .. } => 1 + r,
            Functional::PhiTilde2 { k, r, .. }
            | Functional::GlobalPsi2 { k, r, .. }
            | Functional::GlobalPhiTilde2 { k, r, .. } => k + r,
            Functional::GlobalPsi2Vol { r } => 2 + r,
            Functional::W1 => 1,
        }
    }

    /// Position power `r`, if any.
    pub fn r(&self) -> Option<usize> {
        match self.kind {
            Functional::Phi { r, .. }
            | Functional::PhiTilde3 { r, .. }
            | Functional::PhiTilde2 { r, .. }
            | Functional::GlobalPsi2 { r, .. }
            | Functional::GlobalPsi2Vol { r }
            | Functional::GlobalPhiTilde2 { r, .. }
            | Functional::GlobalT3 { r, .. } => Some(r),
            Functional::W1 => None,
        }
    }

    /// The same functional with position power `r`.
    pub fn with_r(&self, r: usize) -> FunctionalSpec {
        let kind = match self.kind {
            Functional::Phi { k, s, j, .. } => Functional::Phi { k, r, s, j },
            Functional::PhiTilde3 { s, j, .. } => Functional::PhiTilde3 { r, s, j },
            Functional::PhiTilde2 { k, s, .. } => Functional::PhiTilde2 { k, r, s },
            Functional::GlobalPsi2 { k, s, .. } => Functional::GlobalPsi2 { k, r, s },
            Functional::GlobalPsi2Vol { .. } => Functional::GlobalPsi2Vol { r },
            Functional::GlobalPhiTilde2 { k, s, .. } => Functional::GlobalPhiTilde2 { k, r, s },
            Functional::GlobalT3 { s, .. } => Functional::GlobalT3 { r, s },
            Functional::W1 => Functional::W1,
        };
        FunctionalSpec { kind, m: self.m }
    }

    fn name_and_args(&self) -> (&'static str, Vec<usize>) {
        match self.kind {
            Functional::Phi { k, r, s, j } => ("Phi", vec![k, r, s, j]),
            Functional::PhiTilde3 { r, s, j } => ("PhiTilde3", vec![r, s, j]),
            Functional::PhiTilde2 { k, r, s } => ("PhiTilde2", vec![k, r, s]),
            Functional::GlobalPsi2 { k, r, s } => ("GlobalPsi2", vec![k, r, s]),
            Functional::GlobalPsi2Vol { r } => ("GlobalPsi2Vol", vec![r]),
            Functional::GlobalPhiTilde2 { k, r, s } => ("GlobalPhiTilde2", vec![k, r, s]),
            Functional::GlobalT3 { r, s } => ("GlobalT3", vec![r, s]),
            Functional::W1 => ("W1", vec![]),
        }
    }

    fn arg_names(name: &str) -> Option<&'static [&'static str]> {
        Some(match name {
            "Phi" => &["k", "r", "s", "j"],
            "PhiTilde3" => &["r", "s", "j"],
            "PhiTilde2" | "GlobalPsi2" | "GlobalPhiTilde2" => &["k", "r", "s"],
            "GlobalPsi2Vol" => &["r"],
            "GlobalT3" => &["r", "s"],
            "W1" => &[],
            _ => return None,
        })
    }

    fn build(name: &str, a: &[usize]) -> Result<Functional> {
        Ok(match (name, a) {
            ("Phi", &[k, r, s, j]) => Functional::Phi { k, r, s, j },
            ("PhiTilde3", &[r, s, j]) => Functional::PhiTilde3 { r, s, j },
            ("PhiTilde2", &[k, r, s]) => Functional::PhiTilde2 { k, r, s },
            ("GlobalPsi2", &[k, r, s]) => Functional::GlobalPsi2 { k, r, s },
            ("GlobalPsi2Vol", &[r]) => Functional::GlobalPsi2Vol { r },
            ("GlobalPhiTilde2", &[k, r, s]) => Functional::GlobalPhiTilde2 { k, r, s },
            ("GlobalT3", &[r, s]) => Functional::GlobalT3 { r, s },
            ("W1", &[]) => Functional::W1,
            _ => {
                let want = Self::arg_names(name).map(|n| n.len());
                return Err(Error::Parse(match want {
                    Some(n) => format!("{name} takes {n} indices, got {}", a.len()),
                    None => format!("unknown functional \"{name}\""),
                }));
            }
        })
    }

    /// `{"kind": "Phi", "k": 1, "r": 0, "s": 2, "j": 1, "m": 0}`.
    pub fn to_json(&self) -> Value {
        let (name, args) = self.name_and_args();
        let mut m = Map::new();
        m.insert("kind".into(), json!(name));
        for (n, v) in Self::arg_names(name).expect("known").iter().zip(args) {
            m.insert((*n).into(), json!(v));
        }
        m.insert("m".into(), json!(self.m));
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<FunctionalSpec> {
        let name = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("functional: missing string field \"kind\"".into()))?;
        let names = Self::arg_names(name).ok_or_else(|| Error::Parse(format!("unknown functional \"{name}\"")))?;
        let idx = |key: &str| -> Result<usize> {
            v.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse(format!("functional {name}: missing nonnegative integer \"{key}\"")))
        };
        let args = names.iter().map(|n| idx(n)).collect::<Result<Vec<_>>>()?;
        let m = match v.get("m") {
            None => 0,
            Some(_) => idx("m")?,
        };
        Ok(FunctionalSpec { kind: Self::build(name, &args)?, m })
    }

    /// Inline form such as `Phi(1,0,2,1)`, `Q^2*PhiTilde3(0,0,0)` or `W1`.
    pub fn parse(text: &str) -> Result<FunctionalSpec> {
        let t = text.trim();
        let (m, body) = match t.strip_prefix("Q^") {
            Some(rest) => {
                let (pow, body) = rest
                    .split_once('*')
                    .ok_or_else(|| Error::Parse(format!("functional \"{t}\": expected Q^m*<name>(...)")))?;
                let m = pow.trim().parse().map_err(|_| Error::Parse(format!("functional \"{t}\": bad power of Q")))?;
                (m, body.trim())
            }
            None => (0, t),
        };
        let (name, args) = match body.split_once('(') {
            None => (body, Vec::new()),
            Some((name, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("functional \"{t}\": missing closing parenthesis")))?;
                let args = inner
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::Parse(format!("functional \"{t}\": indices must be nonnegative integers")))?;
                (name.trim(), args)
            }
        };
        Ok(FunctionalSpec { kind: Self::build(name, &args)?, m })
    }
}

impl fmt::Display for FunctionalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, args) = self.name_and_args();
        if self.m > 0 {
            write!(f, "Q^{}*", self.m)?;
        }
        if args.is_empty() {
            return write!(f, "{name}");
        }
        let a: Vec<String> = args.iter().map(|x| x.to_string()).collect();
        write!(f, "{name}({})", a.join(","))
    }
}
