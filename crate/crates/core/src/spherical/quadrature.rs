use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

type Rule = (Vec<f64>, Vec<f64>);

fn compute_rule(n: usize) -> Rule {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending. Tables are
/// computed once per order and shared.
pub fn gauss_legendre(n: usize) -> &'static Rule {
    assert!(n > 0, "Gauss-Legendre order must be positive");
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static Rule>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(Default::default).lock().expect("quadrature cache poisoned");
    cache.entry(n).or_insert_with(|| Box::leak(Box::new(compute_rule(n))))
}

/// `int_a^b f` with an `n`-point rule.
pub fn integrate<T, F>(a: f64, b: f64, n: usize, zero: T, mut f: F) -> T
where
    T: std::ops::AddAssign<T>,
    F: FnMut(f64, f64) -> T,
{
    let (x, w) = gauss_legendre(n);
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = zero;
    for (xi, wi) in x.iter().zip(w) {
        acc += f(m + h * xi, h * wi);
    }
    acc
}
