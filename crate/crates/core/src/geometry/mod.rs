//! Convex polytopes in R^2 and R^3 with their face lattice, normal cones
//! and face moments.

mod cone;
mod hull;
mod io;
pub mod moments;

use std::cmp::Ordering;
use std::collections::HashMap;

pub use cone::{triangle_area, Arc, NormalCone, SphericalPolygon};
pub use hull::{hull2d_indices, hull3d, HullFacet, REL_EPS};

use crate::error::{Error, Result};
use crate::tensor::{vector_power, Rotation, SymTensor, Vec3};
use hull::{extent, lex_cmp};

/// A face of dimension `dim - 1` with its outward unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    /// Vertex indices, counterclockwise seen from outside (3D) or the two
    /// endpoints in counterclockwise boundary order (2D).
    pub vertices: Vec<usize>,
    pub normal: Vec3,
    pub offset: f64,
}

/// Full-dimensional convex polytope. Vertices in R^2 carry `z = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec3>,
    facets: Vec<Facet>,
    edges: Vec<[usize; 2]>,
    edge_facets: Vec<[usize; 2]>,
    vertex_facets: Vec<Vec<usize>>,
}

impl Polytope {
    /// Convex hull of a point set.
    pub fn hull(dim: usize, points: &[Vec3]) -> Result<Polytope> {
        match dim {
            2 => Self::hull2(points),
            3 => Self::hull3(points),
            d => Err(Error::UnsupportedDimension(d)),
        }
    }

    fn hull2(points: &[Vec3]) -> Result<Polytope> {
        let cyc = hull2d_indices(points)?;
        let vertices: Vec<Vec3> = cyc.iter().map(|&i| Vec3::new(points[i].x, points[i].y, 0.0)).collect();
        let n = vertices.len();
        let facets = (0..n)
            .map(|i| {
                let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                let d = (b - a).normalize();
                let normal = Vec3::new(d.y, -d.x, 0.0);
                Facet { vertices: vec![i, (i + 1) % n], normal, offset: normal.dot(&a) }
            })
            .collect();
        let vertex_facets = (0..n).map(|i| vec![(i + n - 1) % n, i]).collect();
        Ok(Polytope { dim: 2, vertices, facets, edges: Vec::new(), edge_facets: Vec::new(), vertex_facets })
    }

    fn hull3(points: &[Vec3]) -> Result<Polytope> {
        let (used, hull_facets) = hull3d(points)?;
        let mut order = used.clone();
        order.sort_by(|&a, &b| lex_cmp(&points[a], &points[b]).then(a.cmp(&b)));
        let remap: HashMap<usize, usize> = order.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let vertices: Vec<Vec3> = order.iter().map(|&i| points[i]).collect();
        let mut facets: Vec<Facet> = hull_facets
            .into_iter()
            .map(|f| {
                let mut vs: Vec<usize> = f.vertices.iter().map(|v| remap[v]).collect();
                let start = (0..vs.len()).min_by_key(|&i| vs[i]).unwrap();
                vs.rotate_left(start);
                Facet { vertices: vs, normal: f.normal, offset: f.offset }
            })
            .collect();
        facets.sort_by(|a, b| a.vertices.cmp(&b.vertices));
        Self::assemble3(vertices, facets)
    }

    /// Builds edges and vertex stars from facet cycles and checks the
    /// Euler relation.
    fn assemble3(vertices: Vec<Vec3>, facets: Vec<Facet>) -> Result<Polytope> {
        let mut edge_map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (fi, f) in facets.iter().enumerate() {
            let n = f.vertices.len();
            for k in 0..n {
                let (a, b) = (f.vertices[k], f.vertices[(k + 1) % n]);
                edge_map.entry((a.min(b), a.max(b))).or_default().push(fi);
            }
        }
        let mut keys: Vec<(usize, usize)> = edge_map.keys().copied().collect();
        keys.sort_unstable();
        let mut edges = Vec::with_capacity(keys.len());
        let mut edge_facets = Vec::with_capacity(keys.len());
        for k in keys {
            let fs = &edge_map[&k];
            if fs.len() != 2 {
                return Err(Error::Internal(format!("edge {k:?} lies in {} facets", fs.len())));
            }
            edges.push([k.0, k.1]);
            edge_facets.push([fs[0].min(fs[1]), fs[0].max(fs[1])]);
        }
        let (v, e, f) = (vertices.len() as i64, edges.len() as i64, facets.len() as i64);
        if v - e + f != 2 {
            return Err(Error::Internal(format!("Euler relation violated: {v} - {e} + {f} != 2")));
        }
        let mut star: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
        for (fi, fc) in facets.iter().enumerate() {
            for &vi in &fc.vertices {
                star[vi].push(fi);
            }
        }
        for s in star.iter_mut() {
            let axis = s.iter().map(|&fi| facets[fi].normal).sum::<Vec3>().normalize();
            let helper = if axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
            let e1 = axis.cross(&helper).normalize();
            let e2 = axis.cross(&e1);
            let angle = |fi: usize| {
                let n = facets[fi].normal;
                n.dot(&e2).atan2(n.dot(&e1))
            };
            s.sort_by(|&a, &b| angle(a).partial_cmp(&angle(b)).unwrap_or(Ordering::Equal));
            let first = (0..s.len()).min_by_key(|&i| s[i]).unwrap();
            s.rotate_left(first);
        }
        Ok(Polytope { dim: 3, vertices, facets, edges, edge_facets, vertex_facets: star })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Number of `k`-faces, `0 <= k < dim`.
    pub fn num_faces(&self, k: usize) -> usize {
        match (self.dim, k) {
            (_, 0) => self.vertices.len(),
            (2, 1) | (3, 2) => self.facets.len(),
            (3, 1) => self.edges.len(),
            _ => 0,
        }
    }

    /// Vertex indices of the `i`-th `k`-face.
    pub fn face_vertices(&self, k: usize, i: usize) -> Vec<usize> {
        match (self.dim, k) {
            (_, 0) => vec![i],
            (2, 1) | (3, 2) => self.facets[i].vertices.clone(),
            (3, 1) => self.edges[i].to_vec(),
            _ => panic!("no {k}-faces in dimension {}", self.dim),
        }
    }

    pub fn face_points(&self, k: usize, i: usize) -> Vec<Vec3> {
        self.face_vertices(k, i).iter().map(|&v| self.vertices[v]).collect()
    }

    /// Endpoints of the `i`-th 1-face.
    pub fn edge_endpoints(&self, i: usize) -> [usize; 2] {
        let v = self.face_vertices(1, i);
        [v[0], v[1]]
    }

    /// Default `v_F`: lexicographically larger endpoint minus smaller, normalized.
    pub fn edge_vector(&self, i: usize) -> Vec3 {
        let [a, b] = self.edge_endpoints(i);
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let d = if lex_cmp(&pb, &pa) == Ordering::Greater { pb - pa } else { pa - pb };
        d.normalize()
    }

    /// Facets adjacent to the `i`-th edge of a 3-polytope.
    pub fn edge_facets(&self, i: usize) -> [usize; 2] {
        self.edge_facets[i]
    }

    /// Facets containing a vertex, counterclockwise seen from outside
    /// (3D) or `[previous, next]` in boundary order (2D).
    pub fn vertex_facets(&self, i: usize) -> &[usize] {
        &self.vertex_facets[i]
    }

    /// `H^k(F)`.
    pub fn face_measure(&self, k: usize, i: usize) -> f64 {
        let pts = self.face_points(k, i);
        match pts.len() {
            1 => 1.0,
            2 => (pts[1] - pts[0]).norm(),
            _ => moments::polygon_area(&pts),
        }
    }

    /// Orthonormal basis of the direction space `L(F)`.
    pub fn face_basis(&self, k: usize, i: usize) -> Vec<Vec3> {
        match k {
            0 => Vec::new(),
            1 => vec![self.edge_vector(i)],
            _ => {
                let pts = self.face_points(k, i);
                let e1 = (pts[1] - pts[0]).normalize();
                vec![e1, self.facets[i].normal.cross(&e1)]
            }
        }
    }

    /// `nu(P, F)`.
    pub fn normal_cone(&self, k: usize, i: usize) -> NormalCone {
        match (self.dim, k) {
            (2, 1) | (3, 2) => NormalCone::Point(self.facets[i].normal),
            (3, 1) => {
                let [f1, f2] = self.edge_facets[i];
                let arc = Arc::between(&self.facets[f1].normal, &self.facets[f2].normal)
                    .expect("adjacent facets have distinct normals");
                NormalCone::Arc(arc)
            }
            (2, 0) => {
                let [p, n] = [self.vertex_facets[i][0], self.vertex_facets[i][1]];
                let (a, b) = (self.facets[p].normal, self.facets[n].normal);
                let angle = (a.x * b.y - a.y * b.x).atan2(a.dot(&b));
                NormalCone::Arc(Arc { start: a, ortho: crate::tensor::ubar2(&a), angle })
            }
            (3, 0) => NormalCone::Polygon(SphericalPolygon {
                vertices: self.vertex_facets[i].iter().map(|&f| self.facets[f].normal).collect(),
            }),
            _ => panic!("no {k}-faces in dimension {}", self.dim),
        }
    }

    /// `int_F x^r dH^k`.
    pub fn face_moment(&self, k: usize, i: usize, r: usize) -> SymTensor {
        let pts = self.face_points(k, i);
        match pts.len() {
            1 => vector_power(self.dim, &pts[0], r),
            2 => moments::segment_moment(self.dim, &pts[0], &pts[1], r),
            _ => moments::polygon_moment(self.dim, &pts, r),
        }
    }

    /// `int_P x^r dx`.
    pub fn volume_moment(&self, r: usize) -> SymTensor {
        let dim = self.dim;
        let apex = self.vertices[0];
        let mut out = SymTensor::zeros(dim, r);
        if dim == 2 {
            for i in 1..self.vertices.len() - 1 {
                let (b, c) = (self.vertices[i], self.vertices[i + 1]);
                let area = 0.5 * (b - apex).cross(&(c - apex)).norm();
                out += &moments::simplex_moment(2, &[apex, b, c], area, r);
            }
            return out;
        }
        for f in &self.facets {
            if f.vertices.contains(&0) {
                continue;
            }
            let pts: Vec<Vec3> = f.vertices.iter().map(|&v| self.vertices[v]).collect();
            for i in 1..pts.len() - 1 {
                let (a, b, c) = (pts[0], pts[i], pts[i + 1]);
                let vol = (a - apex).dot(&(b - apex).cross(&(c - apex))).abs() / 6.0;
                out += &moments::simplex_moment(3, &[apex, a, b, c], vol, r);
            }
        }
        out
    }

    pub fn volume(&self) -> f64 {
        self.volume_moment(0).coeffs()[0]
    }

    pub fn centroid(&self) -> Vec3 {
        let m = self.volume_moment(1);
        let v = self.volume();
        let c = m.coeffs();
        Vec3::new(c[0] / v, c[1] / v, if self.dim == 3 { c[2] / v } else { 0.0 })
    }

    pub fn diameter(&self) -> f64 {
        let mut d2: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d2 = d2.max((a - b).norm_squared());
            }
        }
        d2.sqrt()
    }

    /// Support function `max_{x in P} <x, u>`.
    pub fn support(&self, u: &Vec3) -> f64 {
        self.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Interior angle between the facets at the `i`-th edge, measured from
    /// in-facet directions perpendicular to the edge.
    pub fn interior_dihedral(&self, i: usize) -> f64 {
        let [a, b] = self.edges[i];
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let e = (pb - pa).normalize();
        let inward = |f: usize| {
            let c: Vec3 = self.facets[f].vertices.iter().map(|&v| self.vertices[v]).sum::<Vec3>()
                / self.facets[f].vertices.len() as f64;
            let d = c - pa;
            (d - e * d.dot(&e)).normalize()
        };
        let [f1, f2] = self.edge_facets[i];
        let (d1, d2) = (inward(f1), inward(f2));
        d1.cross(&d2).norm().atan2(d1.dot(&d2))
    }

    pub fn translate(&self, t: &Vec3) -> Polytope {
        let t = if self.dim == 2 { Vec3::new(t.x, t.y, 0.0) } else { *t };
        let mut out = self.clone();
        for v in out.vertices.iter_mut() {
            *v += t;
        }
        for f in out.facets.iter_mut() {
            f.offset += f.normal.dot(&t);
        }
        out
    }

    pub fn scale(&self, lambda: f64) -> Result<Polytope> {
        if lambda < 0.0 {
            return Err(Error::NegativeScale(lambda));
        }
        if lambda == 0.0 {
            return Err(Error::Degenerate { affine_rank: 0, dim: self.dim });
        }
        let mut out = self.clone();
        for v in out.vertices.iter_mut() {
            *v *= lambda;
        }
        for f in out.facets.iter_mut() {
            f.offset *= lambda;
        }
        Ok(out)
    }

    /// Image under an orthogonal map. Combinatorics are transported; for
    /// improper maps all cyclic orders are reversed.
    pub fn apply_rotation(&self, rot: &Rotation) -> Result<Polytope> {
        if rot.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rot.dim() });
        }
        if self.dim == 2 {
            let pts: Vec<Vec3> = self.vertices.iter().map(|v| rot.apply(v)).collect();
            return Polytope::hull(2, &pts);
        }
        let mut out = self.clone();
        for v in out.vertices.iter_mut() {
            *v = rot.apply(v);
        }
        for f in out.facets.iter_mut() {
            f.normal = rot.apply(&f.normal);
            if !rot.is_proper() {
                f.vertices.reverse();
                f.vertices.rotate_right(1);
            }
        }
        if !rot.is_proper() {
            for s in out.vertex_facets.iter_mut() {
                s.reverse();
                s.rotate_right(1);
            }
        }
        Ok(out)
    }

    /// `P cap {<y, w> <= c}`.
    pub fn clip_halfspace(&self, w: &Vec3, c: f64) -> Result<Polytope> {
        let eps = REL_EPS * extent(&self.vertices);
        let side: Vec<f64> = self.vertices.iter().map(|v| v.dot(w) - c).collect();
        if side.iter().all(|&s| s <= eps) {
            return Ok(self.clone());
        }
        let mut pts: Vec<Vec3> = self
            .vertices
            .iter()
            .zip(&side)
            .filter(|(_, &s)| s <= eps)
            .map(|(v, _)| *v)
            .collect();
        for i in 0..self.num_faces(1) {
            let [a, b] = self.edge_endpoints(i);
            let (sa, sb) = (side[a], side[b]);
            if (sa < -eps && sb > eps) || (sa > eps && sb < -eps) {
                let (pa, pb) = (self.vertices[a], self.vertices[b]);
                pts.push(pa + (pb - pa) * (sa / (sa - sb)));
            }
        }
        Polytope::hull(self.dim, &pts).map_err(|e| match e {
            Error::Degenerate { .. } => Error::EmptyIntersection,
            other => other,
        })
    }

    /// `P + Q` as the hull of pairwise vertex sums.
    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        minkowski_sum_points(self.dim, &self.vertices, &other.vertices)
    }

    /// Combinatorial equality up to the given vertex tolerance.
    pub fn approx_same(&self, other: &Polytope, tol: f64) -> bool {
        if self.dim != other.dim
            || self.vertices.len() != other.vertices.len()
            || self.facets.len() != other.facets.len()
        {
            return false;
        }
        self.vertices
            .iter()
            .all(|v| other.vertices.iter().any(|w| (v - w).norm() <= tol))
    }
}

/// Hull of `{a + b}`; either summand may be lower-dimensional.
pub fn minkowski_sum_points(dim: usize, a: &[Vec3], b: &[Vec3]) -> Result<Polytope> {
    let mut pts = Vec::with_capacity(a.len() * b.len());
    for p in a {
        for q in b {
            pts.push(p + q);
        }
    }
    Polytope::hull(dim, &pts)
}

/// Axis-parallel box `[lo, hi]`.
pub fn cuboid(lo: &Vec3, hi: &Vec3) -> Result<Polytope> {
    let mut pts = Vec::with_capacity(8);
    for i in 0..8 {
        pts.push(Vec3::new(
            if i & 1 == 0 { lo.x } else { hi.x },
            if i & 2 == 0 { lo.y } else { hi.y },
            if i & 4 == 0 { lo.z } else { hi.z },
        ));
    }
    Polytope::hull(3, &pts)
}

pub fn unit_cube() -> Polytope {
    cuboid(&Vec3::zeros(), &Vec3::repeat(1.0)).expect("cube is full-dimensional")
}

pub fn unit_square() -> Polytope {
    let pts = [Vec3::zeros(), Vec3::x(), Vec3::new(1.0, 1.0, 0.0), Vec3::y()];
    Polytope::hull(2, &pts).expect("square is full-dimensional")
}
