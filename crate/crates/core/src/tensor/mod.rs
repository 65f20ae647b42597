//! Dense symmetric tensors over R^2 and R^3.
//!
//! A rank-`p` symmetric tensor is stored through its associated homogeneous
//! polynomial `T(x, ..., x)`: `coeffs[i]` is the coefficient of the monomial
//! `x^alpha` for the `i`-th multi-index `alpha` (graded lexicographic order,
//! descending in the first coordinate). With this convention the symmetric
//! product is an ordinary polynomial product and `x^r` is the `r`-th power of
//! a linear form. Evaluation on distinct arguments applies the multinomial
//! weights `alpha! / p!` (polarization).

mod json;
mod rotation;

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

pub use json::{tensor_from_json, tensor_to_json};
pub use rotation::Rotation;

use crate::error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;

/// Default absolute tolerance for tensor comparison.
pub const DEFAULT_ATOL: f64 = 1e-12;
/// Default relative tolerance for tensor comparison.
pub const DEFAULT_RTOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor {
    dim: usize,
    rank: usize,
    coeffs: Vec<f64>,
}

fn check_dim(dim: usize) {
    assert!(dim == 2 || dim == 3, "ambient dimension must be 2 or 3, got {dim}");
}

/// Number of multi-indices of total degree `rank` in `dim` variables.
pub fn num_coeffs(dim: usize, rank: usize) -> usize {
    match dim {
        2 => rank + 1,
        3 => (rank + 1) * (rank + 2) / 2,
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// Position of `alpha` in storage order.
#[inline]
pub fn index_of(dim: usize, alpha: &[usize; 3]) -> usize {
    if dim == 2 {
        alpha[1]
    } else {
        let p = alpha[0] + alpha[1] + alpha[2];
        let k = p - alpha[0];
        k * (k + 1) / 2 + (k - alpha[1])
    }
}

/// All multi-indices of degree `rank`, in storage order. For `dim == 2`
/// the third entry is always zero.
pub fn multi_indices(dim: usize, rank: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(num_coeffs(dim, rank));
    if dim == 2 {
        for i in 0..=rank {
            out.push([rank - i, i, 0]);
        }
    } else {
        for a in (0..=rank).rev() {
            for b in (0..=rank - a).rev() {
                out.push([a, b, rank - a - b]);
            }
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `p! / alpha!`
pub fn multinomial(alpha: &[usize; 3]) -> f64 {
    let p = alpha[0] + alpha[1] + alpha[2];
    factorial(p) / (factorial(alpha[0]) * factorial(alpha[1]) * factorial(alpha[2]))
}

impl SymTensor {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        check_dim(dim);
        SymTensor { dim, rank, coeffs: vec![0.0; num_coeffs(dim, rank)] }
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        check_dim(dim);
        SymTensor { dim, rank: 0, coeffs: vec![value] }
    }

    /// Rank-1 tensor `x -> <v, x>`; for `dim == 2` the z-component is ignored.
    pub fn vector(dim: usize, v: &Vec3) -> Self {
        check_dim(dim);
        SymTensor { dim, rank: 1, coeffs: v.iter().take(dim).copied().collect() }
    }

    pub fn from_coeffs(dim: usize, rank: usize, coeffs: Vec<f64>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let n = num_coeffs(dim, rank);
        if coeffs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: coeffs.len() });
        }
        Ok(SymTensor { dim, rank, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, alpha: &[usize; 3]) -> f64 {
        self.coeffs[index_of(self.dim, alpha)]
    }

    pub fn set_coeff(&mut self, alpha: &[usize; 3], value: f64) {
        let i = index_of(self.dim, alpha);
        self.coeffs[i] = value;
    }

    /// Value of a rank-0 tensor.
    pub fn as_scalar(&self) -> Option<f64> {
        (self.rank == 0).then(|| self.coeffs[0])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SymTensor {
            dim: self.dim,
            rank: self.rank,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: f64, other: &SymTensor) {
        self.assert_same_shape(other);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += factor * b;
        }
    }

    fn assert_same_shape(&self, other: &SymTensor) {
        assert_eq!(
            (self.dim, self.rank),
            (other.dim, other.rank),
            "tensor shape mismatch"
        );
    }

    /// Symmetric tensor product.
    pub fn product(&self, other: &SymTensor) -> Result<SymTensor> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(self.product_unchecked(other))
    }

    pub(crate) fn product_unchecked(&self, other: &SymTensor) -> SymTensor {
        let dim = self.dim;
        if self.rank == 0 {
            return other.scaled(self.coeffs[0]);
        }
        if other.rank == 0 {
            return self.scaled(other.coeffs[0]);
        }
        let mut out = SymTensor::zeros(dim, self.rank + other.rank);
        let ia = multi_indices(dim, self.rank);
        let ib = multi_indices(dim, other.rank);
        for (a, ca) in ia.iter().zip(&self.coeffs) {
            if *ca == 0.0 {
                continue;
            }
            for (b, cb) in ib.iter().zip(&other.coeffs) {
                let g = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                out.coeffs[index_of(dim, &g)] += ca * cb;
            }
        }
        out
    }

    /// `T(a, ..., a)`, the associated polynomial at `a`.
    pub fn eval_diag(&self, a: &Vec3) -> f64 {
        multi_indices(self.dim, self.rank)
            .iter()
            .zip(&self.coeffs)
            .map(|(alpha, c)| {
                let mut m = *c;
                for (k, &e) in alpha.iter().enumerate().take(self.dim) {
                    for _ in 0..e {
                        m *= a[k];
                    }
                }
                m
            })
            .sum()
    }

    /// Evaluation as a symmetric multilinear form.
    pub fn eval(&self, args: &[Vec3]) -> Result<f64> {
        if args.len() != self.rank {
            return Err(Error::ArityMismatch { rank: self.rank, args: args.len() });
        }
        let mut poly = SymTensor::scalar(self.dim, 1.0);
        for v in args {
            poly = poly.product_unchecked(&SymTensor::vector(self.dim, v));
        }
        Ok(self.apolar_dot(&poly))
    }

    /// Inner product `sum_alpha T_alpha S_alpha alpha!/p!`; equals the
    /// Frobenius product of the full coordinate arrays.
    pub fn apolar_dot(&self, other: &SymTensor) -> f64 {
        self.assert_same_shape(other);
        multi_indices(self.dim, self.rank)
            .iter()
            .zip(self.coeffs.iter().zip(&other.coeffs))
            .map(|(alpha, (a, b))| a * b / multinomial(alpha))
            .sum()
    }

    /// The O(n) action `(theta T)(x_1..x_p) = T(theta^-1 x_1, ..)`.
    pub fn rotate(&self, rot: &Rotation) -> Result<SymTensor> {
        if rot.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rot.dim() });
        }
        if self.rank == 0 {
            return Ok(self.clone());
        }
        let dim = self.dim;
        // x_c is replaced by the linear form <theta e_c, x>
        let powers: Vec<Vec<SymTensor>> = (0..dim)
            .map(|c| {
                let col = rot.column(c);
                (0..=self.rank).map(|k| vector_power(dim, &col, k)).collect()
            })
            .collect();
        let mut out = SymTensor::zeros(dim, self.rank);
        for (alpha, c) in multi_indices(dim, self.rank).iter().zip(&self.coeffs) {
            if *c == 0.0 {
                continue;
            }
            let mut term = powers[0][alpha[0]].product_unchecked(&powers[1][alpha[1]]);
            if dim == 3 {
                term = term.product_unchecked(&powers[2][alpha[2]]);
            }
            out.axpy(*c, &term);
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &SymTensor) -> f64 {
        self.assert_same_shape(other);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `max|A - B| <= atol + rtol * max(|A|, |B|)` in the coefficient max-norm.
    pub fn approx_eq(&self, other: &SymTensor, atol: f64, rtol: f64) -> bool {
        if self.dim != other.dim || self.rank != other.rank {
            return false;
        }
        let scale = self.max_norm().max(other.max_norm());
        self.max_abs_diff(other) <= atol + rtol * scale
    }

    pub fn approx_eq_default(&self, other: &SymTensor) -> bool {
        self.approx_eq(other, DEFAULT_ATOL, DEFAULT_RTOL)
    }
}

impl Add for &SymTensor {
    type Output = SymTensor;
    fn add(self, rhs: &SymTensor) -> SymTensor {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &SymTensor {
    type Output = SymTensor;
    fn sub(self, rhs: &SymTensor) -> SymTensor {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl AddAssign<&SymTensor> for SymTensor {
    fn add_assign(&mut self, rhs: &SymTensor) {
        self.axpy(1.0, rhs);
    }
}

impl AddAssign<SymTensor> for SymTensor {
    fn add_assign(&mut self, rhs: SymTensor) {
        self.axpy(1.0, &rhs);
    }
}

impl Mul<f64> for &SymTensor {
    type Output = SymTensor;
    fn mul(self, rhs: f64) -> SymTensor {
        self.scaled(rhs)
    }
}

impl Neg for &SymTensor {
    type Output = SymTensor;
    fn neg(self) -> SymTensor {
        SymTensor {
            dim: self.dim,
            rank: self.rank,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Symmetric product `a ⊙ b`.
pub fn sym_product(a: &SymTensor, b: &SymTensor) -> Result<SymTensor> {
    a.product(b)
}

/// `v^r`; `v^0` is the scalar 1.
///
/// Coefficients are `r!/alpha! * prod v_c^alpha_c`, built by repeated
/// multiplication so that `(-v)^r` equals `(-1)^r v^r` bit for bit.
pub fn vector_power(dim: usize, v: &Vec3, r: usize) -> SymTensor {
    check_dim(dim);
    let coeffs = multi_indices(dim, r)
        .iter()
        .map(|alpha| {
            let mut m = 1.0;
            for (c, &e) in alpha.iter().enumerate().take(dim) {
                for _ in 0..e {
                    m *= v[c];
                }
            }
            multinomial(alpha) * m
        })
        .collect();
    SymTensor { dim, rank: r, coeffs }
}

/// Metric tensor `Q(x, y) = <x, y>`.
pub fn metric_q(dim: usize) -> SymTensor {
    let mut q = SymTensor::zeros(dim, 2);
    for c in 0..dim {
        let mut alpha = [0; 3];
        alpha[c] = 2;
        q.set_coeff(&alpha, 1.0);
    }
    q
}

/// `Q_L(a, b) = <pi_L a, pi_L b>` for `L` spanned by an orthonormal basis.
pub fn metric_ql(dim: usize, basis: &[Vec3]) -> Result<SymTensor> {
    for (i, a) in basis.iter().enumerate() {
        if dim == 2 && a.z != 0.0 {
            return Err(Error::DimensionMismatch { expected: 2, found: 3 });
        }
        for (j, b) in basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (a.dot(b) - target).abs();
            if dev > 1e-10 {
                return Err(Error::NonOrthonormal(dev));
            }
        }
    }
    let mut q = SymTensor::zeros(dim, 2);
    for b in basis {
        q.axpy(1.0, &vector_power(dim, b, 2));
    }
    Ok(q)
}

/// `Q^m`.
pub fn metric_power(dim: usize, m: usize) -> SymTensor {
    let q = metric_q(dim);
    (0..m).fold(SymTensor::scalar(dim, 1.0), |acc, _| acc.product_unchecked(&q))
}

pub fn rotate_tensor(t: &SymTensor, rot: &Rotation) -> Result<SymTensor> {
    t.rotate(rot)
}

/// Vector product in R^3.
pub fn cross3(v: &Vec3, u: &Vec3) -> Vec3 {
    v.cross(u)
}

/// The unit vector `ubar` with `(u, ubar)` a positively oriented basis of
/// R^2: rotation of `u` by +pi/2.
pub fn ubar2(u: &Vec3) -> Vec3 {
    Vec3::new(-u.y, u.x, 0.0)
}
