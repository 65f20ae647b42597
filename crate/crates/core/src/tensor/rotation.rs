use nalgebra::{Matrix3, Unit, UnitQuaternion};
use rand::Rng;

use super::Vec3;
use crate::error::{Error, Result};

/// An orthogonal map of R^2 or R^3 (proper or improper).
///
/// Planar maps are stored as 3x3 matrices acting trivially on e3, so that
/// every geometric routine can share the same vector type.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    dim: usize,
    matrix: Matrix3<f64>,
}

const ORTHO_TOL: f64 = 1e-12;

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        Rotation { dim, matrix: Matrix3::identity() }
    }

    /// Validates orthonormality of the columns and a determinant of +-1.
    pub fn from_matrix(dim: usize, matrix: Matrix3<f64>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut m = matrix;
        if dim == 2 {
            for i in 0..2 {
                if m[(2, i)].abs() > ORTHO_TOL || m[(i, 2)].abs() > ORTHO_TOL {
                    return Err(Error::NonOrthonormal(m[(2, i)].abs().max(m[(i, 2)].abs())));
                }
            }
            m[(2, 2)] = 1.0;
        }
        let dev = (m.transpose() * m - Matrix3::identity()).abs().max();
        if dev > ORTHO_TOL {
            return Err(Error::NonOrthonormal(dev));
        }
        Ok(Rotation { dim, matrix: m })
    }

    /// Counterclockwise rotation of the plane.
    pub fn planar(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Rotation {
            dim: 2,
            matrix: Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
        }
    }

    /// Right-handed rotation about `axis` in R^3.
    pub fn about_axis(axis: &Vec3, angle: f64) -> Self {
        let q = UnitQuaternion::from_axis_angle(&Unit::new_normalize(*axis), angle);
        Rotation { dim: 3, matrix: q.to_rotation_matrix().into_inner() }
    }

    /// Reflection across the hyperplane orthogonal to `normal`.
    pub fn reflection(dim: usize, normal: &Vec3) -> Self {
        let mut n = *normal;
        if dim == 2 {
            n.z = 0.0;
        }
        let n = n.normalize();
        Rotation { dim, matrix: Matrix3::identity() - 2.0 * n * n.transpose() }
    }

    /// Haar-random proper rotation.
    pub fn random_proper<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        if dim == 2 {
            return Rotation::planar(rng.gen_range(0.0..std::f64::consts::TAU));
        }
        // uniform unit quaternion via normalized Gaussian 4-vector
        let mut q = [0.0f64; 4];
        loop {
            for x in q.iter_mut() {
                *x = rng.gen_range(-1.0..1.0);
            }
            let n2: f64 = q.iter().map(|x| x * x).sum();
            if n2 > 1e-4 && n2 <= 1.0 {
                break;
            }
        }
        let uq = UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(q[0], q[1], q[2], q[3]));
        Rotation { dim: 3, matrix: uq.to_rotation_matrix().into_inner() }
    }

    /// Random improper map: a random proper rotation followed by the
    /// reflection across the first coordinate hyperplane.
    pub fn random_improper<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let r = Rotation::random_proper(dim, rng);
        Rotation::reflection(dim, &Vec3::x()).compose(&r)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn det(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn is_proper(&self) -> bool {
        self.det() > 0.0
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation { dim: self.dim, matrix: self.matrix * other.matrix }
    }

    pub fn inverse(&self) -> Rotation {
        Rotation { dim: self.dim, matrix: self.matrix.transpose() }
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.matrix * v
    }

    /// Image of the i-th standard basis vector.
    pub fn column(&self, i: usize) -> Vec3 {
        self.matrix.column(i).into_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn random_maps_are_orthogonal_with_expected_orientation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for dim in [2, 3] {
            for _ in 0..20 {
                let p = Rotation::random_proper(dim, &mut rng);
                assert!(Rotation::from_matrix(dim, *p.matrix()).is_ok());
                assert!((p.det() - 1.0).abs() < 1e-12);
                let q = Rotation::random_improper(dim, &mut rng);
                assert!((q.det() + 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_orthonormal() {
        let m = Matrix3::new(1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(Rotation::from_matrix(3, m), Err(Error::NonOrthonormal(_))));
    }
}
