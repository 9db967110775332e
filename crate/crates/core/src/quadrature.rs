//! Gauss-Legendre quadrature rules.

use crate::real::{cast, cast_usize, Real};

/// Nodes and weights of an n-point Gauss-Legendre rule on (-1, 1).
///
/// Nodes are found by Newton iteration on the Legendre recurrence with the
/// usual Chebyshev starting guesses; converges to machine precision in a
/// handful of steps for any practical n.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1, "quadrature rule needs at least one node");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = cast_usize::<T>(n);
    let eps = T::epsilon() * cast::<T>(8.0);
    for k in 0..(n + 1) / 2 {
        let guess = (T::PI() * (cast_usize::<T>(k) + cast::<T>(0.75)) / (nf + cast::<T>(0.5))).cos();
        let mut x = guess;
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= eps {
                break;
            }
        }
        let w = cast::<T>(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[k] = -x;
        weights[k] = w;
        nodes[n - 1 - k] = x;
        weights[n - 1 - k] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to (a, b).
pub fn gauss_legendre_on<T: Real>(n: usize, a: T, b: T) -> (Vec<T>, Vec<T>) {
    let (x, w) = gauss_legendre::<T>(n);
    let half = cast::<T>(0.5);
    let mid = (a + b) * half;
    let scale = (b - a) * half;
    (
        x.into_iter().map(|xi| mid + scale * xi).collect(),
        w.into_iter().map(|wi| wi * scale).collect(),
    )
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut prev = T::one();
    let mut cur = x;
    for k in 2..=n {
        let kf = cast_usize::<T>(k);
        let next = ((cast::<T>(2.0) * kf - T::one()) * x * cur - (kf - T::one()) * prev) / kf;
        prev = cur;
        cur = next;
    }
    let deriv = cast_usize::<T>(n) * (x * cur - prev) / (x * x - T::one());
    (cur, deriv)
}
