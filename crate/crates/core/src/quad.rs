//! Gauss-Legendre quadrature, used for the ansatz integrals and as an
//! independent oracle in tests.

use crate::scalar::Real;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; standard cosine initial
/// guesses converge in a handful of steps.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 2);
    let mut xs = vec![T::zero(); n];
    let mut ws = vec![T::zero(); n];
    let nf = T::of(n as f64);
    for i in 0..n.div_ceil(2) {
        let mut x = T::of((std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos());
        let mut dp = T::one();
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by upward recurrence
            let mut p0 = T::one();
            let mut p1 = x;
            for j in 2..=n {
                let jf = T::of(j as f64);
                let p2 = ((T::of(2.0) * jf - T::one()) * x * p1 - (jf - T::one()) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - T::one());
            let dx = p1 / dp;
            x = x - dx;
            if dx.abs() < T::of(1e-16) {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = T::of(2.0) / ((T::one() - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// Integrate `f` over [a, b] with an n-point Gauss-Legendre rule.
pub fn integrate<T: Real>(f: impl Fn(T) -> T, a: T, b: T, n: usize) -> T {
    let (xs, ws) = gauss_legendre::<T>(n);
    let half = (b - a) / T::of(2.0);
    let mid = (a + b) / T::of(2.0);
    let mut acc = T::zero();
    for (&x, &w) in xs.iter().zip(&ws) {
        acc = acc + w * f(mid + half * x);
    }
    acc * half
}
