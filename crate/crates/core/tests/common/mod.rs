#![allow(dead_code)]

use itertools::Itertools;
use minktensor::tensor::{multinomial, SymTensor, Vec3};

/// Full coordinate array of `t`, indexed by `i_1 + n i_2 + n^2 i_3 + ..`.
pub fn dense(t: &SymTensor) -> Vec<f64> {
    let (n, p) = (t.dim(), t.rank());
    tuples(n, p)
        .iter()
        .map(|idx| {
            let a = alpha(idx);
            t.coeff(&a) / multinomial(&a)
        })
        .collect()
}

pub fn tuples(n: usize, p: usize) -> Vec<Vec<usize>> {
    if p == 0 {
        return vec![Vec::new()];
    }
    (0..p).map(|_| 0..n).multi_cartesian_product().collect()
}

pub fn alpha(idx: &[usize]) -> [usize; 3] {
    let mut a = [0; 3];
    for &i in idx {
        a[i] += 1;
    }
    a
}

fn flat(n: usize, idx: &[usize]) -> usize {
    idx.iter().rev().fold(0, |acc, &i| acc * n + i)
}

/// Brute-force symmetrized tensor product, averaged over all `(p+q)!`
/// permutations of the index slots.
pub fn permutation_product(a: &SymTensor, b: &SymTensor) -> SymTensor {
    let n = a.dim();
    let (p, q) = (a.rank(), b.rank());
    let (da, db) = (dense(a), dense(b));
    let mut out = SymTensor::zeros(n, p + q);
    let perms: Vec<Vec<usize>> = (0..p + q).permutations(p + q).collect();
    for idx in tuples(n, p + q) {
        let al = alpha(&idx);
        if idx.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        let mut sum = 0.0;
        for s in &perms {
            let ia: Vec<usize> = s[..p].iter().map(|&k| idx[k]).collect();
            let ib: Vec<usize> = s[p..].iter().map(|&k| idx[k]).collect();
            sum += da[flat(n, &ia)] * db[flat(n, &ib)];
        }
        out.set_coeff(&al, multinomial(&al) * sum / perms.len() as f64);
    }
    out
}

/// `T(v_1, .., v_p)` by contracting the full array.
pub fn contract(t: &SymTensor, args: &[Vec3]) -> f64 {
    let n = t.dim();
    let d = dense(t);
    tuples(n, t.rank())
        .iter()
        .map(|idx| d[flat(n, idx)] * idx.iter().zip(args).map(|(&i, v)| v[i]).product::<f64>())
        .sum()
}

pub fn random_tensor(n: usize, p: usize, seed: u64) -> SymTensor {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let len = SymTensor::zeros(n, p).coeffs().len();
    SymTensor::from_coeffs(n, p, (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

pub fn cube() -> minktensor::geometry::Polytope {
    minktensor::geometry::unit_cube()
}
