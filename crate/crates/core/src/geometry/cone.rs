use crate::tensor::{Rotation, Vec3};

/// Great-circle arc `u(a) = cos(a) start + sin(a) ortho`, `a` in `[0, angle]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Arc {
    pub start: Vec3,
    pub ortho: Vec3,
    pub angle: f64,
}

impl Arc {
    /// The shorter arc from `from` to `to`; `None` if they are (anti)parallel.
    pub fn between(from: &Vec3, to: &Vec3) -> Option<Arc> {
        let c = from.dot(to);
        let w = to - from * c;
        let s = w.norm();
        if s < 1e-15 {
            return None;
        }
        Some(Arc { start: *from, ortho: w / s, angle: s.atan2(c) })
    }

    pub fn point(&self, alpha: f64) -> Vec3 {
        self.start * alpha.cos() + self.ortho * alpha.sin()
    }

    pub fn end(&self) -> Vec3 {
        self.point(self.angle)
    }

    /// Sub-arc over the parameter interval `[a0, a1]`.
    pub fn sub(&self, a0: f64, a1: f64) -> Arc {
        Arc { start: self.point(a0), ortho: self.point(a0 + std::f64::consts::FRAC_PI_2), angle: a1 - a0 }
    }

    pub fn rotated(&self, rot: &Rotation) -> Arc {
        Arc { start: rot.apply(&self.start), ortho: rot.apply(&self.ortho), angle: self.angle }
    }
}

/// Convex spherical polygon given by its vertices, counterclockwise seen
/// from outside the sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalPolygon {
    pub vertices: Vec<Vec3>,
}

impl SphericalPolygon {
    /// Normalized vertex sum; lies in the interior of a convex polygon.
    pub fn center(&self) -> Vec3 {
        self.vertices.iter().sum::<Vec3>().normalize()
    }

    /// Area by the spherical excess of the fan about the first vertex.
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        (1..v.len() - 1).map(|i| triangle_area(&v[0], &v[i], &v[i + 1])).sum()
    }

    pub fn rotated(&self, rot: &Rotation) -> SphericalPolygon {
        let mut vertices: Vec<Vec3> = self.vertices.iter().map(|v| rot.apply(v)).collect();
        if !rot.is_proper() {
            vertices.reverse();
        }
        SphericalPolygon { vertices }
    }

    /// Inward edge normals `v_i x v_{i+1}`; `<u, m> >= 0` on the polygon.
    pub fn edge_normals(&self) -> Vec<Vec3> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| self.vertices[i].cross(&self.vertices[(i + 1) % n]).normalize())
            .collect()
    }

    pub fn contains(&self, u: &Vec3, tol: f64) -> bool {
        self.edge_normals().iter().all(|m| m.dot(u) >= -tol)
    }
}

/// Area of the spherical triangle (Van Oosterom - Strackee).
pub fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let num = a.dot(&b.cross(c)).abs();
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

/// The set of outer unit normals of a face.
#[derive(Clone, Debug, PartialEq)]
pub enum NormalCone {
    Point(Vec3),
    Arc(Arc),
    Polygon(SphericalPolygon),
}

impl NormalCone {
    /// Spherical measure of the appropriate dimension (1 for points).
    pub fn measure(&self) -> f64 {
        match self {
            NormalCone::Point(_) => 1.0,
            NormalCone::Arc(a) => a.angle,
            NormalCone::Polygon(p) => p.area(),
        }
    }

    pub fn rotated(&self, rot: &Rotation) -> NormalCone {
        match self {
            NormalCone::Point(u) => NormalCone::Point(rot.apply(u)),
            NormalCone::Arc(a) => NormalCone::Arc(a.rotated(rot)),
            NormalCone::Polygon(p) => NormalCone::Polygon(p.rotated(rot)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn octant_area() {
        let p = SphericalPolygon { vertices: vec![Vec3::x(), Vec3::y(), Vec3::z()] };
        assert!((p.area() - FRAC_PI_2).abs() < 1e-14);
        assert!(p.contains(&Vec3::new(1.0, 1.0, 1.0).normalize(), 0.0));
        assert!(!p.contains(&Vec3::new(-1.0, 1.0, 1.0).normalize(), 0.0));
    }

    #[test]
    fn arc_between_and_sub() {
        let a = Arc::between(&Vec3::x(), &Vec3::y()).unwrap();
        assert!((a.angle - FRAC_PI_2).abs() < 1e-15);
        assert!((a.end() - Vec3::y()).norm() < 1e-15);
        let s = a.sub(0.2, 0.5);
        assert!((s.start - a.point(0.2)).norm() < 1e-15);
        assert!((s.end() - a.point(0.5)).norm() < 1e-15);
        assert!(Arc::between(&Vec3::x(), &-Vec3::x()).is_none());
        let half = Arc { start: Vec3::x(), ortho: Vec3::z(), angle: PI };
        assert!((half.end() + Vec3::x()).norm() < 1e-15);
    }
}
