//! Finite-difference stencils on arbitrary 1D node sets.
//!
//! Weights come from Fornberg's recurrence, so the same machinery serves
//! uniform half-offset grids and Gauss quadrature grids. Interior first and
//! second derivatives use symmetric 5-point windows (4th order on uniform
//! grids); the two nodes at each boundary use skewed windows, widened to 6
//! points for the second derivative so the edge order matches the interior.
//! Boundary windows mirror each other exactly, which keeps parity identities
//! on symmetric grids at machine precision.

use std::ops::{AddAssign, Mul};

use num_traits::Zero;

use crate::real::Real;

/// Fornberg weights at evaluation point `z` for derivatives 0..=max_deriv
/// over the given nodes. Returned as `w[d][j]`.
pub fn fd_weights<T: Real>(nodes: &[T], z: T, max_deriv: usize) -> Vec<Vec<T>> {
    let n = nodes.len();
    assert!(n > max_deriv, "need more nodes than the derivative order");
    let mut w = vec![vec![T::zero(); n]; max_deriv + 1];
    let mut c1 = T::one();
    let mut c4 = nodes[0] - z;
    w[0][0] = T::one();
    for i in 1..n {
        let mn = i.min(max_deriv);
        let mut c2 = T::one();
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 = c2 * c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    let kf = T::from_usize(k).unwrap();
                    w[k][i] = c1 * (kf * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                let kf = T::from_usize(k).unwrap();
                w[k][j] = (c4 * w[k][j] - kf * w[k - 1][j]) / c3;
            }
            w[0][j] = c4 * w[0][j] / c3;
        }
        c1 = c2;
    }
    w
}

const D1_WINDOW: usize = 5;
const D2_WINDOW_EDGE: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topology<T> {
    Bounded,
    Periodic { period: T },
}

/// Precomputed derivative stencils for one node set.
#[derive(Debug, Clone)]
pub struct DiffOp<T> {
    n: usize,
    periodic: bool,
    // signed window starts (negative means wrap for periodic topology)
    d1_start: Vec<isize>,
    d1_w: Vec<T>, // stride D1_WINDOW
    d2_start: Vec<isize>,
    d2_w: Vec<T>, // stride D2_WINDOW_EDGE, zero padded
    d2_len: Vec<usize>,
}

impl<T: Real> DiffOp<T> {
    pub fn new(points: &[T], topology: Topology<T>) -> Self {
        let n = points.len();
        assert!(n >= D2_WINDOW_EDGE, "grid too small for 4th-order stencils");
        let periodic = matches!(topology, Topology::Periodic { .. });
        let mut d1_start = Vec::with_capacity(n);
        let mut d1_w = Vec::with_capacity(n * D1_WINDOW);
        let mut d2_start = Vec::with_capacity(n);
        let mut d2_w = Vec::with_capacity(n * D2_WINDOW_EDGE);
        let mut d2_len = Vec::with_capacity(n);

        let node_at = |j: isize| -> T {
            match topology {
                Topology::Bounded => points[j as usize],
                Topology::Periodic { period } => {
                    let m = j.rem_euclid(n as isize) as usize;
                    let shift = T::from_isize(j.div_euclid(n as isize)).unwrap();
                    points[m] + shift * period
                }
            }
        };

        for i in 0..n {
            let i = i as isize;
            // first derivative: symmetric 5-point window, clamped when bounded
            let s1 = if periodic {
                i - 2
            } else {
                (i - 2).clamp(0, n as isize - D1_WINDOW as isize)
            };
            let window: Vec<T> = (s1..s1 + D1_WINDOW as isize).map(node_at).collect();
            let w = fd_weights(&window, node_at(i), 1);
            d1_start.push(s1);
            d1_w.extend_from_slice(&w[1]);

            // second derivative: 5-point interior, 6-point at bounded edges
            let (s2, len) = if periodic {
                (i - 2, D1_WINDOW)
            } else if i < 2 {
                (0, D2_WINDOW_EDGE)
            } else if i >= n as isize - 2 {
                (n as isize - D2_WINDOW_EDGE as isize, D2_WINDOW_EDGE)
            } else {
                (i - 2, D1_WINDOW)
            };
            let window: Vec<T> = (s2..s2 + len as isize).map(node_at).collect();
            let w = fd_weights(&window, node_at(i), 2);
            d2_start.push(s2);
            let mut padded = w[2].clone();
            padded.resize(D2_WINDOW_EDGE, T::zero());
            d2_w.extend_from_slice(&padded);
            d2_len.push(len);
        }

        Self {
            n,
            periodic,
            d1_start,
            d1_w,
            d2_start,
            d2_w,
            d2_len,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// First derivative of the sampled values.
    pub fn d1<V>(&self, values: &[V]) -> Vec<V>
    where
        V: Copy + Zero + AddAssign + Mul<T, Output = V>,
    {
        self.apply(values, &self.d1_start, &self.d1_w, D1_WINDOW, None)
    }

    /// Second derivative of the sampled values.
    pub fn d2<V>(&self, values: &[V]) -> Vec<V>
    where
        V: Copy + Zero + AddAssign + Mul<T, Output = V>,
    {
        self.apply(
            values,
            &self.d2_start,
            &self.d2_w,
            D2_WINDOW_EDGE,
            Some(&self.d2_len),
        )
    }

    fn apply<V>(
        &self,
        values: &[V],
        starts: &[isize],
        weights: &[T],
        stride: usize,
        lens: Option<&[usize]>,
    ) -> Vec<V>
    where
        V: Copy + Zero + AddAssign + Mul<T, Output = V>,
    {
        assert_eq!(values.len(), self.n, "field length does not match grid");
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let s = starts[i];
            let len = lens.map_or(D1_WINDOW, |l| l[i]).min(stride);
            let mut acc = V::zero();
            for j in 0..len {
                let idx = if self.periodic {
                    (s + j as isize).rem_euclid(self.n as isize) as usize
                } else {
                    (s + j as isize) as usize
                };
                acc += values[idx] * weights[i * stride + j];
            }
            out.push(acc);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_reproduce_central_coefficients() {
        // classic 5-point central stencils on a unit-spaced grid
        let nodes: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let w = fd_weights(&nodes, 2.0, 2);
        let d1 = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
        for j in 0..5 {
            assert!((w[1][j] - d1[j]).abs() < 1e-14);
            assert!((w[2][j] - d2[j]).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_is_fourth_order_on_smooth_function() {
        let err_at = |n: usize| -> (f64, f64) {
            let h = 1.0 / n as f64;
            let pts: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
            let op = DiffOp::new(&pts, Topology::Bounded);
            let f: Vec<f64> = pts.iter().map(|&x| (3.0 * x).sin()).collect();
            let d1 = op.d1(&f);
            let d2 = op.d2(&f);
            let e1 = pts
                .iter()
                .zip(&d1)
                .map(|(&x, &d)| (d - 3.0 * (3.0 * x).cos()).abs())
                .fold(0.0f64, f64::max);
            let e2 = pts
                .iter()
                .zip(&d2)
                .map(|(&x, &d)| (d + 9.0 * (3.0 * x).sin()).abs())
                .fold(0.0f64, f64::max);
            (e1, e2)
        };
        let (a1, a2) = err_at(100);
        let (b1, b2) = err_at(200);
        assert!(a1 / b1 > 12.0, "d1 ratio {}", a1 / b1);
        assert!(a2 / b2 > 12.0, "d2 ratio {}", a2 / b2);
    }

    #[test]
    fn periodic_derivative_wraps() {
        let n = 64;
        let h = std::f64::consts::TAU / n as f64;
        let pts: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
        let op = DiffOp::new(&pts, Topology::Periodic { period: std::f64::consts::TAU });
        let f: Vec<f64> = pts.iter().map(|&x| x.sin()).collect();
        let d1 = op.d1(&f);
        for (x, d) in pts.iter().zip(&d1) {
            assert!((d - x.cos()).abs() < 1e-6);
        }
    }

    #[test]
    fn nonuniform_nodes_differentiate_polynomials_exactly() {
        // degree-4 polynomial must be exact on any 5..6-point window
        let pts: Vec<f64> = vec![0.0, 0.13, 0.4, 0.77, 0.91, 1.3, 1.55, 2.01, 2.3, 2.71];
        let op = DiffOp::new(&pts, Topology::Bounded);
        let f: Vec<f64> = pts.iter().map(|&x| x.powi(4) - 2.0 * x.powi(2) + 3.0).collect();
        let d1 = op.d1(&f);
        let d2 = op.d2(&f);
        for i in 0..pts.len() {
            let x = pts[i];
            assert!((d1[i] - (4.0 * x.powi(3) - 4.0 * x)).abs() < 1e-10);
            assert!((d2[i] - (12.0 * x.powi(2) - 4.0)).abs() < 1e-9);
        }
    }
}
