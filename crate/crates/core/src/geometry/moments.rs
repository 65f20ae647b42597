use crate::tensor::{vector_power, SymTensor, Vec3};

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Complete homogeneous symmetric tensor `sum_{|b|=r} prod_i v_i^{b_i}`.
pub fn complete_homogeneous(dim: usize, verts: &[Vec3], r: usize) -> SymTensor {
    // h[k] holds the degree-k sum over the vertices processed so far
    let mut h: Vec<SymTensor> = (0..=r)
        .map(|k| if k == 0 { SymTensor::scalar(dim, 1.0) } else { SymTensor::zeros(dim, k) })
        .collect();
    for v in verts {
        let powers: Vec<SymTensor> = (0..=r).map(|k| vector_power(dim, v, k)).collect();
        let mut next = h.clone();
        for k in 1..=r {
            for j in 1..=k {
                let term = powers[j].product(&h[k - j]).expect("same dimension");
                next[k] += &term;
            }
        }
        h = next;
    }
    h.pop().expect("non-empty")
}

/// `int_S x^r dH^d` over a `d`-simplex with the given `d+1` vertices and
/// `d`-volume `volume`.
pub fn simplex_moment(dim: usize, verts: &[Vec3], volume: f64, r: usize) -> SymTensor {
    let d = verts.len() - 1;
    let factor = volume * factorial(r) * factorial(d) / factorial(r + d);
    complete_homogeneous(dim, verts, r).scaled(factor)
}

pub fn segment_moment(dim: usize, a: &Vec3, b: &Vec3, r: usize) -> SymTensor {
    simplex_moment(dim, &[*a, *b], (b - a).norm(), r)
}

/// Moment of a planar convex polygon (vertices in cyclic order) by a fan.
pub fn polygon_moment(dim: usize, verts: &[Vec3], r: usize) -> SymTensor {
    let mut out = SymTensor::zeros(dim, r);
    for i in 1..verts.len() - 1 {
        let (a, b, c) = (verts[0], verts[i], verts[i + 1]);
        let area = 0.5 * (b - a).cross(&(c - a)).norm();
        if area > 0.0 {
            out += &simplex_moment(dim, &[a, b, c], area, r);
        }
    }
    out
}

pub fn polygon_area(verts: &[Vec3]) -> f64 {
    (1..verts.len() - 1)
        .map(|i| 0.5 * (verts[i] - verts[0]).cross(&(verts[i + 1] - verts[0])).norm())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Vec3;

    /// Gauss-Legendre on [0,1] via the Duffy map; exact for the degrees used here.
    fn triangle_quadrature(a: Vec3, b: Vec3, c: Vec3, f: impl Fn(Vec3) -> f64) -> f64 {
        let (x, w) = crate::spherical::gauss_legendre(12);
        let area = 0.5 * (b - a).cross(&(c - a)).norm();
        let mut s = 0.0;
        for i in 0..x.len() {
            for j in 0..x.len() {
                let (u, v) = (0.5 * (x[i] + 1.0), 0.5 * (x[j] + 1.0));
                let p = a + (b - a) * u + (c - b) * (u * v);
                s += 0.25 * w[i] * w[j] * u * f(p);
            }
        }
        2.0 * area * s
    }

    #[test]
    fn segment_examples() {
        let m = segment_moment(3, &Vec3::zeros(), &Vec3::x(), 1);
        assert!(m.approx_eq_default(&SymTensor::vector(3, &(Vec3::x() * 0.5))));
        let m = segment_moment(2, &Vec3::zeros(), &Vec3::x(), 2);
        assert!((m.coeff(&[2, 0, 0]) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.coeff(&[1, 1, 0]), 0.0);
        assert_eq!(m.coeff(&[0, 2, 0]), 0.0);
    }

    #[test]
    fn triangle_moments_match_quadrature() {
        let (a, b, c) = (Vec3::new(0.2, -0.4, 1.0), Vec3::new(1.3, 0.1, 0.7), Vec3::new(-0.5, 0.9, 0.2));
        let y = Vec3::new(0.7, -1.1, 0.4);
        for r in 0..6 {
            let m = polygon_moment(3, &[a, b, c], r);
            let exact = m.eval_diag(&y);
            let quad = triangle_quadrature(a, b, c, |p| p.dot(&y).powi(r as i32));
            assert!((exact - quad).abs() < 1e-12 * (1.0 + quad.abs()), "r={r}: {exact} vs {quad}");
        }
    }
}
