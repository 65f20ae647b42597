use rayon::prelude::*;

use super::spec::{Functional, FunctionalSpec};
use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::spherical::{product_moment, Extra, RegionSpec, WeightFn};
use crate::tensor::{metric_power, metric_ql, vector_power, SymTensor, Vec3};

/// Choice of the unit vector `v_F` along each edge of a 3-polytope.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum EdgeOrientation {
    /// Lexicographically larger endpoint minus smaller.
    #[default]
    Lexicographic,
    Reversed,
    /// The sign with `<v_F, l> > 0`; ties keep the lexicographic choice.
    Canonical(Vec3),
    /// Lexicographic, negated where the mask is set.
    Flips(Vec<bool>),
}

impl EdgeOrientation {
    pub fn edge_vector(&self, p: &Polytope, i: usize) -> Vec3 {
        let v = p.edge_vector(i);
        match self {
            EdgeOrientation::Lexicographic => v,
            EdgeOrientation::Reversed => -v,
            EdgeOrientation::Canonical(l) => {
                if v.dot(l) < 0.0 {
                    -v
                } else {
                    v
                }
            }
            EdgeOrientation::Flips(mask) => {
                if mask.get(i).copied().unwrap_or(false) {
                    -v
                } else {
                    v
                }
            }
        }
    }
}

/// `H^{d-1}(S^{d-1})`.
pub fn omega(d: usize) -> f64 {
    match d {
        0 => panic!("omega_0 is undefined"),
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / (d - 2) as f64 * omega(d - 2),
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Sums per-face tensors in face order, whatever the thread count.
fn sum_faces<F>(dim: usize, rank: usize, n: usize, f: F) -> Result<SymTensor>
where
    F: Fn(usize) -> Result<SymTensor> + Sync + Send,
{
    let parts: Vec<SymTensor> = (0..n).into_par_iter().map(f).collect::<Result<_>>()?;
    let mut out = SymTensor::zeros(dim, rank);
    for p in &parts {
        out += p;
    }
    Ok(out)
}

/// Evaluates `spec` on `(P, eta)` with weight `f` and lexicographic `v_F`.
pub fn evaluate(p: &Polytope, spec: &FunctionalSpec, region: &RegionSpec, weight: &WeightFn) -> Result<SymTensor> {
    evaluate_with(p, spec, region, weight, &EdgeOrientation::Lexicographic)
}

pub fn evaluate_with(
    p: &Polytope,
    spec: &FunctionalSpec,
    region: &RegionSpec,
    weight: &WeightFn,
    orient: &EdgeOrientation,
) -> Result<SymTensor> {
    let dim = p.dim();
    spec.validate(dim)?;
    if spec.is_global() && (*region != RegionSpec::Full || *weight != WeightFn::One) {
        return Err(Error::InvalidSpec(format!("{spec} is a total value and takes no region or weight")));
    }
    let full = RegionSpec::Full;
    let base = match spec.kind {
        Functional::Phi { k, r, s, j } => phi(p, k, r, s, j, region, weight)?,
        Functional::PhiTilde3 { r, s, j } => phi_tilde3(p, r, s, j, region, weight, orient)?,
        Functional::PhiTilde2 { k, r, s } => phi_tilde2(p, k, r, s, region, weight)?,
        Functional::GlobalPhiTilde2 { k, r, s } => phi_tilde2(p, k, r, s, &full, &WeightFn::One)?,
        Functional::GlobalT3 { r, s } => phi_tilde3(p, r, s, 0, &full, &WeightFn::One, orient)?,
        Functional::GlobalPsi2 { k, r, s } => face_sum(p, k, r, s, &Extra::None, &full, &WeightFn::One)?,
        Functional::GlobalPsi2Vol { r } => p.volume_moment(r),
        Functional::W1 => face_sum(p, 1, 0, 0, &Extra::None, region, weight)?,
    };
    Ok(if spec.m == 0 { base } else { metric_power(dim, spec.m).product_unchecked(&base) })
}

/// `sum_{F in F_k} int_{F x nu} 1_eta f x^r u^s extra`, unnormalized.
fn face_sum(
    p: &Polytope,
    k: usize,
    r: usize,
    s: usize,
    extra: &Extra,
    region: &RegionSpec,
    weight: &WeightFn,
) -> Result<SymTensor> {
    let dim = p.dim();
    sum_faces(dim, r + s + extra.rank(), p.num_faces(k), |i| {
        product_moment(dim, k, &p.face_points(k, i), r, &p.normal_cone(k, i), s, extra, region, weight)
    })
}

fn phi(p: &Polytope, k: usize, r: usize, s: usize, j: usize, region: &RegionSpec, weight: &WeightFn) -> Result<SymTensor> {
    let dim = p.dim();
    let norm = 1.0 / (factorial(r) * factorial(s) * omega(dim - k + s));
    let out = sum_faces(dim, 2 * j + r + s, p.num_faces(k), |i| {
        let m = product_moment(dim, k, &p.face_points(k, i), r, &p.normal_cone(k, i), s, &Extra::None, region, weight)?;
        if j == 0 || m.is_zero() {
            return Ok(if j == 0 { m } else { SymTensor::zeros(dim, 2 * j + r + s) });
        }
        let ql = metric_ql(dim, &p.face_basis(k, i))?;
        let qlj = (1..j).fold(ql.clone(), |acc, _| acc.product_unchecked(&ql));
        Ok(qlj.product_unchecked(&m))
    })?;
    Ok(out.scaled(norm))
}

fn phi_tilde3(
    p: &Polytope,
    r: usize,
    s: usize,
    j: usize,
    region: &RegionSpec,
    weight: &WeightFn,
    orient: &EdgeOrientation,
) -> Result<SymTensor> {
    sum_faces(3, 2 * j + r + s + 2, p.num_faces(1), |i| {
        let v = orient.edge_vector(p, i);
        let m = product_moment(3, 1, &p.face_points(1, i), r, &p.normal_cone(1, i), s, &Extra::Cross(v), region, weight)?;
        Ok(vector_power(3, &v, 2 * j + 1).product_unchecked(&m))
    })
}

fn phi_tilde2(p: &Polytope, k: usize, r: usize, s: usize, region: &RegionSpec, weight: &WeightFn) -> Result<SymTensor> {
    face_sum(p, k, r, s, &Extra::Ubar, region, weight)
}

/// `W_1(P, f) = sum_F H^1(F) int_{nu(P,F)} f dH^1`.
pub fn w1(p: &Polytope, weight: &WeightFn) -> Result<f64> {
    let t = evaluate(p, &Functional::W1.into(), &RegionSpec::Full, weight)?;
    Ok(t.as_scalar().expect("scalar"))
}
