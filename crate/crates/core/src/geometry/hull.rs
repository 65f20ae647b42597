//! Convex hulls in the plane (monotone chain) and in space (incremental
//! insertion followed by merging of coplanar triangles).

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tensor::Vec3;

/// Relative tolerance for coplanarity and collinearity decisions.
pub const REL_EPS: f64 = 1e-9;

pub(crate) fn lex_cmp(a: &Vec3, b: &Vec3) -> Ordering {
    for k in 0..3 {
        match a[k].partial_cmp(&b[k]).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

pub(crate) fn extent(points: &[Vec3]) -> f64 {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm()
}

fn cross2(o: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Indices of the extreme points of a planar set (z ignored), in
/// counterclockwise order starting at the lexicographically smallest point.
/// Collinear boundary points are dropped.
pub fn hull2d_indices(points: &[Vec3]) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::Degenerate { affine_rank: 0, dim: 2 });
    }
    let flat: Vec<Vec3> = points.iter().map(|p| Vec3::new(p.x, p.y, 0.0)).collect();
    let diam = extent(&flat);
    let eps = REL_EPS * diam.max(f64::MIN_POSITIVE);
    let mut idx: Vec<usize> = (0..flat.len()).collect();
    idx.sort_by(|&i, &j| lex_cmp(&flat[i], &flat[j]).then(i.cmp(&j)));
    idx.dedup_by(|a, b| (flat[*a] - flat[*b]).norm() <= eps);
    if idx.len() < 3 {
        return Err(Error::Degenerate { affine_rank: idx.len() - 1, dim: 2 });
    }
    // signed area tolerance scales with the diameter
    let area_eps = eps * diam;
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && cross2(&flat[lower[lower.len() - 2]], &flat[lower[lower.len() - 1]], &flat[i]) <= area_eps
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && cross2(&flat[upper[upper.len() - 2]], &flat[upper[upper.len() - 1]], &flat[i]) <= area_eps
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::Degenerate { affine_rank: 1, dim: 2 });
    }
    Ok(lower)
}

/// A facet of a spatial hull: vertex indices counterclockwise seen from
/// outside, outward unit normal and offset `<n, x> = offset`.
#[derive(Clone, Debug)]
pub struct HullFacet {
    pub vertices: Vec<usize>,
    pub normal: Vec3,
    pub offset: f64,
}

#[derive(Clone, Debug)]
struct Tri {
    v: [usize; 3],
    n: Vec3,
    off: f64,
    alive: bool,
}

fn make_tri(points: &[Vec3], v: [usize; 3]) -> Tri {
    let n = (points[v[1]] - points[v[0]]).cross(&(points[v[2]] - points[v[0]]));
    let norm = n.norm();
    let n = if norm > 0.0 { n / norm } else { n };
    let off = n.dot(&points[v[0]]);
    Tri { v, n, off, alive: true }
}

fn initial_simplex(points: &[Vec3], eps: f64) -> Result<[usize; 4]> {
    let n = points.len();
    let i0 = (0..n).min_by(|&a, &b| lex_cmp(&points[a], &points[b])).unwrap();
    let far = |score: &dyn Fn(&Vec3) -> f64| -> (usize, f64) {
        let mut best = (i0, -1.0);
        for (i, p) in points.iter().enumerate() {
            let s = score(p);
            if s > best.1 {
                best = (i, s);
            }
        }
        best
    };
    let p0 = points[i0];
    let (i1, d1) = far(&|p| (p - p0).norm());
    if d1 <= eps {
        return Err(Error::Degenerate { affine_rank: 0, dim: 3 });
    }
    let dir = (points[i1] - p0) / d1;
    let (i2, d2) = far(&|p| {
        let q = p - p0;
        (q - dir * q.dot(&dir)).norm()
    });
    if d2 <= eps {
        return Err(Error::Degenerate { affine_rank: 1, dim: 3 });
    }
    let nrm = dir.cross(&(points[i2] - p0)).normalize();
    let (i3, d3) = far(&|p| (p - p0).dot(&nrm).abs());
    if d3 <= eps {
        return Err(Error::Degenerate { affine_rank: 2, dim: 3 });
    }
    Ok([i0, i1, i2, i3])
}

/// Extreme points and facets of a spatial point set. Returned vertex
/// indices refer to `points`; coplanar facets are merged and points in the
/// relative interior of edges or facets are discarded.
pub fn hull3d(points: &[Vec3]) -> Result<(Vec<usize>, Vec<HullFacet>)> {
    if points.len() < 4 {
        return Err(Error::Degenerate { affine_rank: points.len().saturating_sub(1), dim: 3 });
    }
    let diam = extent(points);
    let eps = REL_EPS * diam;
    let s = initial_simplex(points, eps)?;
    let inner: Vec3 = s.iter().map(|&i| points[i]).sum::<Vec3>() / 4.0;

    let mut tris: Vec<Tri> = Vec::new();
    let mut edge_map: HashMap<(usize, usize), usize> = HashMap::new();
    let add_tri = |tris: &mut Vec<Tri>, edge_map: &mut HashMap<(usize, usize), usize>, v: [usize; 3]| {
        let t = make_tri(points, v);
        let id = tris.len();
        for k in 0..3 {
            edge_map.insert((v[k], v[(k + 1) % 3]), id);
        }
        tris.push(t);
    };
    for face in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
        let mut v = [s[face[0]], s[face[1]], s[face[2]]];
        let t = make_tri(points, v);
        if t.n.dot(&inner) - t.off > 0.0 {
            v.swap(1, 2);
        }
        add_tri(&mut tris, &mut edge_map, v);
    }

    let mut order: Vec<usize> = (0..points.len()).filter(|i| !s.contains(i)).collect();
    let dist = |i: usize| (points[i] - inner).norm();
    order.sort_by(|&a, &b| dist(b).partial_cmp(&dist(a)).unwrap_or(Ordering::Equal).then(a.cmp(&b)));

    let mut alive: Vec<usize> = (0..tris.len()).collect();
    let mut visible: Vec<usize> = Vec::new();
    for &p in &order {
        let pt = points[p];
        visible.clear();
        visible.extend(alive.iter().copied().filter(|&f| tris[f].n.dot(&pt) - tris[f].off > eps));
        if visible.is_empty() {
            continue;
        }
        for &f in &visible {
            tris[f].alive = false;
        }
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &f in &visible {
            let v = tris[f].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                match edge_map.get(&(b, a)) {
                    Some(&g) if tris[g].alive => horizon.push((a, b)),
                    Some(_) => {}
                    None => return Err(Error::Internal("hull: unmatched edge".into())),
                }
            }
        }
        for &f in &visible {
            let v = tris[f].v;
            for k in 0..3 {
                let key = (v[k], v[(k + 1) % 3]);
                if edge_map.get(&key) == Some(&f) {
                    edge_map.remove(&key);
                }
            }
        }
        for (a, b) in horizon {
            add_tri(&mut tris, &mut edge_map, [a, b, p]);
            alive.push(tris.len() - 1);
        }
        alive.retain(|&f| tris[f].alive);
    }

    merge_coplanar(points, &tris, &alive, &edge_map, eps)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn merge_coplanar(
    points: &[Vec3],
    tris: &[Tri],
    alive: &[usize],
    edge_map: &HashMap<(usize, usize), usize>,
    eps: f64,
) -> Result<(Vec<usize>, Vec<HullFacet>)> {
    let mut parent: Vec<usize> = (0..tris.len()).collect();
    for &f in alive {
        let t = &tris[f];
        for k in 0..3 {
            let (a, b) = (t.v[k], t.v[(k + 1) % 3]);
            let g = *edge_map
                .get(&(b, a))
                .ok_or_else(|| Error::Internal("hull: open surface".into()))?;
            let other = &tris[g];
            let apex = other.v.iter().copied().find(|&x| x != a && x != b).unwrap();
            if t.n.dot(&other.n) > 0.0 && (t.n.dot(&points[apex]) - t.off).abs() <= eps {
                let (ra, rb) = (find(&mut parent, f), find(&mut parent, g));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for &f in alive {
        let r = find(&mut parent, f);
        groups.entry(r).or_default().push(f);
    }
    let mut roots: Vec<usize> = groups.keys().copied().collect();
    roots.sort_unstable();

    let mut facets = Vec::with_capacity(roots.len());
    for r in roots {
        let members = &groups[&r];
        let mut nsum = Vec3::zeros();
        let mut verts: Vec<usize> = Vec::new();
        for &f in members {
            let t = &tris[f];
            let area = (points[t.v[1]] - points[t.v[0]]).cross(&(points[t.v[2]] - points[t.v[0]])).norm();
            nsum += t.n * area;
            verts.extend_from_slice(&t.v);
        }
        verts.sort_unstable();
        verts.dedup();
        let normal = nsum.normalize();
        let cycle = if members.len() == 1 {
            tris[members[0]].v.to_vec()
        } else {
            planar_cycle(points, &verts, &normal)?
        };
        let offset = cycle.iter().map(|&i| normal.dot(&points[i])).sum::<f64>() / cycle.len() as f64;
        facets.push(HullFacet { vertices: cycle, normal, offset });
    }
    let mut used: Vec<usize> = facets.iter().flat_map(|f| f.vertices.iter().copied()).collect();
    used.sort_unstable();
    used.dedup();
    Ok((used, facets))
}

/// Counterclockwise (around `normal`) hull of coplanar points.
fn planar_cycle(points: &[Vec3], verts: &[usize], normal: &Vec3) -> Result<Vec<usize>> {
    let helper = if normal.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = normal.cross(&helper).normalize();
    let e2 = normal.cross(&e1);
    let local: Vec<Vec3> = verts
        .iter()
        .map(|&i| Vec3::new(points[i].dot(&e1), points[i].dot(&e2), 0.0))
        .collect();
    let cyc = hull2d_indices(&local).map_err(|_| Error::Internal("hull: degenerate merged facet".into()))?;
    Ok(cyc.into_iter().map(|k| verts[k]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Vec<Vec3> {
        let mut v = Vec::new();
        for i in 0..8 {
            v.push(Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64));
        }
        v
    }

    #[test]
    fn square_hull_drops_interior_and_collinear() {
        let pts = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.5, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.3, 0.4, 0.0),
        ];
        assert_eq!(hull2d_indices(&pts).unwrap(), vec![0, 1, 3, 4]);
        let line = vec![Vec3::zeros(), Vec3::x(), Vec3::x() * 2.0];
        assert_eq!(hull2d_indices(&line), Err(Error::Degenerate { affine_rank: 1, dim: 2 }));
    }

    #[test]
    fn cube_facets_are_merged_squares() {
        let mut pts = cube();
        pts.push(Vec3::repeat(0.5));
        pts.push(Vec3::new(0.5, 0.5, 1.0));
        let (verts, facets) = hull3d(&pts).unwrap();
        assert_eq!(verts.len(), 8);
        assert_eq!(facets.len(), 6);
        for f in &facets {
            assert_eq!(f.vertices.len(), 4);
            let c: Vec3 = f.vertices.iter().map(|&i| pts[i]).sum::<Vec3>() / 4.0;
            assert!(f.normal.dot(&(c - Vec3::repeat(0.5))) > 0.0);
            let a = pts[f.vertices[0]];
            let b = pts[f.vertices[1]];
            let d = pts[f.vertices[2]];
            assert!((b - a).cross(&(d - b)).dot(&f.normal) > 0.0);
        }
    }

    #[test]
    fn planar_input_reports_rank() {
        let pts: Vec<Vec3> = cube().into_iter().filter(|p| p.z == 0.0).collect();
        assert_eq!(hull3d(&pts).unwrap_err(), Error::Degenerate { affine_rank: 2, dim: 3 });
    }
}
