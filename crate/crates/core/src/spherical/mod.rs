//! Moment integrals of tensor-valued functions over normal cones, restricted
//! to regions of support elements and weighted by spherical functions.

mod arc;
mod polygon;
mod quadrature;
mod region;
mod weight;

pub(crate) use arc::arc_intervals;
pub use arc::{arc_moment, arc_moment_closed, arc_moment_gl, Extra, ARC_GL_ORDER};
pub use polygon::{polygon_moment, polygon_moment_polar, polygon_moment_subdivision};
pub use quadrature::{gauss_legendre, integrate};
pub use region::{clip_face, Cap, ProductPiece, RegionBox, RegionSpec, RegionTerm, Slab};
pub use weight::WeightFn;

use crate::error::Result;
use crate::geometry::moments::{polygon_moment as flat_polygon_moment, segment_moment};
use crate::geometry::{Arc, NormalCone, SphericalPolygon};
use crate::tensor::{vector_power, SymTensor, Vec3};

/// Part of a normal cone inside an intersection of caps.
#[derive(Clone, Debug, PartialEq)]
pub enum ConePiece {
    Point(Vec3),
    Arc(Arc),
    /// Polygon whose cap indicator is resolved inside the quadrature.
    Polygon(SphericalPolygon, Vec<Cap>),
}

/// Splits a cone against the caps: points are kept or dropped, arcs are
/// clipped to exact sub-arcs, polygons carry the caps along.
pub fn restrict(cone: &NormalCone, caps: &[Cap]) -> Vec<ConePiece> {
    match cone {
        NormalCone::Point(u) => {
            if caps.iter().all(|c| c.contains(u)) {
                vec![ConePiece::Point(*u)]
            } else {
                Vec::new()
            }
        }
        NormalCone::Arc(a) => arc::arc_intervals(a, caps).into_iter().map(|(t0, t1)| ConePiece::Arc(a.sub(t0, t1))).collect(),
        NormalCone::Polygon(p) => vec![ConePiece::Polygon(p.clone(), caps.to_vec())],
    }
}

/// `int_{cone cap caps} f(u) u^s (x) extra(u)`; point cones are evaluated at
/// their single normal.
pub fn cone_moment(
    dim: usize,
    cone: &NormalCone,
    s: usize,
    extra: &Extra,
    caps: &[Cap],
    weight: &WeightFn,
) -> Result<SymTensor> {
    let mut out = SymTensor::zeros(dim, s + extra.rank());
    for piece in restrict(cone, caps) {
        match piece {
            ConePiece::Point(u) => out.axpy(weight.eval(&u), &arc::integrand(dim, &u, s, extra)),
            ConePiece::Arc(a) => out += &arc_moment(dim, &a, s, extra, &[], weight),
            ConePiece::Polygon(p, c) => {
                assert_eq!(*extra, Extra::None, "vector factors are only defined on arcs and points");
                out += &polygon_moment(&p, s, &c, weight)?;
            }
        }
    }
    Ok(out)
}

/// `int_F x^r dH^k` for a face given by its points (`k + 1` points for
/// `k <= 1`, a cycle for `k = 2`).
pub fn flat_moment(dim: usize, k: usize, pts: &[Vec3], r: usize) -> SymTensor {
    match k {
        0 => vector_power(dim, &pts[0], r),
        1 => segment_moment(dim, &pts[0], &pts[1], r),
        _ => flat_polygon_moment(dim, pts, r),
    }
}

/// `int_{F x nu} 1_region(x, u) f(u) x^r (x) u^s (x) extra(u)`.
///
/// Exact for every region: each product piece of the inclusion-exclusion
/// expansion separates into a clipped face moment and a capped cone moment.
#[allow(clippy::too_many_arguments)]
pub fn product_moment(
    dim: usize,
    k: usize,
    face: &[Vec3],
    r: usize,
    cone: &NormalCone,
    s: usize,
    extra: &Extra,
    region: &RegionSpec,
    weight: &WeightFn,
) -> Result<SymTensor> {
    let mut out = SymTensor::zeros(dim, r + s + extra.rank());
    for (sign, piece) in region.pieces()? {
        let clipped;
        let pts = if piece.slabs.is_empty() {
            face
        } else {
            clipped = clip_face(k, face, &piece.slabs);
            if clipped.is_empty() {
                continue;
            }
            &clipped[..]
        };
        let u = cone_moment(dim, cone, s, extra, &piece.caps, weight)?;
        if u.is_zero() {
            continue;
        }
        let x = flat_moment(dim, k, pts, r);
        out.axpy(sign, &x.product_unchecked(&u));
    }
    Ok(out)
}
