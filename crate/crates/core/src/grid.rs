//! Sample grids and complex-valued fields.
//!
//! Symmetric grids place nodes at +-(k + 1/2) h so that no node sits at the
//! origin and x -> -x permutes nodes exactly; radial grids start at h/2 for
//! the same reason. Reflections are always node permutations, never
//! interpolation.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fd::{DiffOp, Topology};
use crate::quadrature::gauss_legendre_on;
use crate::real::{cast, cast_usize, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Nodes on (0, r_max), origin excluded.
    Radial,
    /// Nodes on (-x_max, x_max), mirror-symmetric about 0.
    Symmetric,
}

#[derive(Debug, Clone)]
pub struct Grid1D<T: Real> {
    points: Vec<T>,
    quad_weights: Vec<T>,
    spacing: Option<T>,
    kind: GridKind,
    diff: DiffOp<T>,
}

impl<T: Real> Grid1D<T> {
    /// Uniform radial grid: r_k = (k + 1/2) h, h = r_max / n.
    pub fn radial_uniform(r_max: T, n: usize) -> Arc<Self> {
        let h = r_max / cast_usize::<T>(n);
        let points: Vec<T> = (0..n)
            .map(|k| (cast_usize::<T>(k) + cast::<T>(0.5)) * h)
            .collect();
        let diff = DiffOp::new(&points, Topology::Bounded);
        Arc::new(Self {
            quad_weights: vec![h; n],
            points,
            spacing: Some(h),
            kind: GridKind::Radial,
            diff,
        })
    }

    /// Gauss-Legendre radial grid on (0, r_max); quadrature weights are the
    /// Gauss weights.
    pub fn radial_gauss(r_max: T, n: usize) -> Arc<Self> {
        let (points, quad_weights) = gauss_legendre_on(n, T::zero(), r_max);
        let diff = DiffOp::new(&points, Topology::Bounded);
        Arc::new(Self {
            points,
            quad_weights,
            spacing: None,
            kind: GridKind::Radial,
            diff,
        })
    }

    /// Uniform symmetric grid with `n_half` nodes per side: x = +-(k + 1/2) h.
    /// Negative nodes are exact negations of the positive ones.
    pub fn symmetric_uniform(x_max: T, n_half: usize) -> Arc<Self> {
        let h = x_max / cast_usize::<T>(n_half);
        let mut points = Vec::with_capacity(2 * n_half);
        for k in (0..n_half).rev() {
            points.push(-((cast_usize::<T>(k) + cast::<T>(0.5)) * h));
        }
        for k in 0..n_half {
            points.push((cast_usize::<T>(k) + cast::<T>(0.5)) * h);
        }
        let diff = DiffOp::new(&points, Topology::Bounded);
        Arc::new(Self {
            quad_weights: vec![h; 2 * n_half],
            points,
            spacing: Some(h),
            kind: GridKind::Symmetric,
            diff,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn quad_weights(&self) -> &[T] {
        &self.quad_weights
    }

    pub fn spacing(&self) -> Option<T> {
        self.spacing
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub(crate) fn diff(&self) -> &DiffOp<T> {
        &self.diff
    }

    /// Index of the mirror node under x -> -x.
    pub fn reflection_index(&self, i: usize) -> Result<usize> {
        if self.kind != GridKind::Symmetric {
            return Err(Error::AsymmetricGrid("x -> -x on a radial grid"));
        }
        let j = self.len() - 1 - i;
        if self.points[j] + self.points[i] != T::zero() {
            return Err(Error::AsymmetricGrid("x -> -x"));
        }
        Ok(j)
    }
}

/// Complex samples of a function on a [`Grid1D`].
#[derive(Debug, Clone)]
pub struct GridField<T: Real> {
    grid: Arc<Grid1D<T>>,
    values: Vec<Complex<T>>,
}

impl<T: Real> GridField<T> {
    pub fn new(grid: Arc<Grid1D<T>>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values on a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: &Arc<Grid1D<T>>, f: impl Fn(T) -> Complex<T>) -> Self {
        let values = grid.points().iter().map(|&x| f(x)).collect();
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn from_real_fn(grid: &Arc<Grid1D<T>>, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(grid, |x| Complex::new(f(x), T::zero()))
    }

    pub fn grid(&self) -> &Arc<Grid1D<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    /// Pointwise map carrying the node coordinate.
    pub fn map(&self, f: impl Fn(T, Complex<T>) -> Complex<T>) -> Self {
        let values = self
            .grid
            .points()
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| f(x, v))
            .collect();
        Self {
            grid: Arc::clone(&self.grid),
            values,
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid.points() != other.grid.points() {
            return Err(Error::GridMismatch("zip of fields on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            grid: Arc::clone(&self.grid),
            values,
        })
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.map(|_, v| v * c)
    }

    /// First derivative by the grid's cached stencils.
    pub fn derivative(&self) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.grid.diff().d1(&self.values),
        }
    }

    pub fn second_derivative(&self) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.grid.diff().d2(&self.values),
        }
    }

    /// Quadrature-weighted inner product <self, other> (self conjugated),
    /// with an extra pointwise measure factor.
    pub fn inner_with_measure(&self, other: &Self, measure: impl Fn(T) -> T) -> Result<Complex<T>> {
        if self.values.len() != other.values.len() {
            return Err(Error::GridMismatch("inner product size mismatch".into()));
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for ((&x, &w), (&a, &b)) in self
            .grid
            .points()
            .iter()
            .zip(self.grid.quad_weights())
            .zip(self.values.iter().zip(&other.values))
        {
            acc = acc + a.conj() * b * (w * measure(x));
        }
        Ok(acc)
    }

    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.inner_with_measure(other, |_| T::one())
    }

    pub fn norm(&self) -> T {
        self.inner(self).expect("same grid").re.sqrt()
    }
}

/// Uniform half-offset angular product grid on (0, pi) x (0, 2 pi).
///
/// Node counts are constrained (theta even, phi divisible by 4) so the three
/// reflections permute nodes exactly and no node falls on a coordinate
/// singularity of the angular operator.
#[derive(Debug)]
pub struct AngularGrid<T: Real> {
    theta: Vec<T>,
    phi: Vec<T>,
    dtheta: DiffOp<T>,
    dphi: DiffOp<T>,
    /// phi -> pi - phi
    perm_r1: Vec<usize>,
    /// phi -> -phi
    perm_r2: Vec<usize>,
    /// theta -> pi - theta
    perm_r3: Vec<usize>,
}

impl<T: Real> AngularGrid<T> {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Arc<Self>> {
        if n_theta < 8 || n_theta % 2 != 0 {
            return Err(Error::AsymmetricGrid("theta -> pi - theta (node count must be even)"));
        }
        if n_phi < 8 || n_phi % 4 != 0 {
            return Err(Error::AsymmetricGrid(
                "phi -> pi - phi (node count must be divisible by 4)",
            ));
        }
        let h_theta = T::PI() / cast_usize::<T>(n_theta);
        let theta: Vec<T> = (0..n_theta)
            .map(|k| (cast_usize::<T>(k) + cast::<T>(0.5)) * h_theta)
            .collect();
        let h_phi = (T::PI() + T::PI()) / cast_usize::<T>(n_phi);
        let phi: Vec<T> = (0..n_phi)
            .map(|k| (cast_usize::<T>(k) + cast::<T>(0.5)) * h_phi)
            .collect();
        let perm_r1 = (0..n_phi)
            .map(|j| (n_phi / 2 + n_phi - 1 - j) % n_phi)
            .collect();
        let perm_r2 = (0..n_phi).map(|j| n_phi - 1 - j).collect();
        let perm_r3 = (0..n_theta).map(|i| n_theta - 1 - i).collect();
        let dtheta = DiffOp::new(&theta, Topology::Bounded);
        let dphi = DiffOp::new(
            &phi,
            Topology::Periodic {
                period: T::PI() + T::PI(),
            },
        );
        Ok(Arc::new(Self {
            theta,
            phi,
            dtheta,
            dphi,
            perm_r1,
            perm_r2,
            perm_r3,
        }))
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn phi(&self) -> &[T] {
        &self.phi
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    pub(crate) fn dtheta(&self) -> &DiffOp<T> {
        &self.dtheta
    }

    pub(crate) fn dphi(&self) -> &DiffOp<T> {
        &self.dphi
    }

    pub(crate) fn perm_r1(&self) -> &[usize] {
        &self.perm_r1
    }

    pub(crate) fn perm_r2(&self) -> &[usize] {
        &self.perm_r2
    }

    pub(crate) fn perm_r3(&self) -> &[usize] {
        &self.perm_r3
    }
}

/// Complex samples on an [`AngularGrid`], row-major theta x phi.
#[derive(Debug, Clone)]
pub struct AngularField<T: Real> {
    grid: Arc<AngularGrid<T>>,
    values: Vec<Complex<T>>,
}

impl<T: Real> AngularField<T> {
    pub fn from_fn(grid: &Arc<AngularGrid<T>>, f: impl Fn(T, T) -> Complex<T>) -> Self {
        let mut values = Vec::with_capacity(grid.n_theta() * grid.n_phi());
        for &th in grid.theta() {
            for &ph in grid.phi() {
                values.push(f(th, ph));
            }
        }
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn from_real_fn(grid: &Arc<AngularGrid<T>>, f: impl Fn(T, T) -> T) -> Self {
        Self::from_fn(grid, |t, p| Complex::new(f(t, p), T::zero()))
    }

    pub fn grid(&self) -> &Arc<AngularGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, i_theta: usize, i_phi: usize) -> Complex<T> {
        self.values[i_theta * self.grid.n_phi() + i_phi]
    }

    pub(crate) fn from_values(grid: &Arc<AngularGrid<T>>, values: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(values.len(), grid.n_theta() * grid.n_phi());
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_grid_mirrors_exactly() {
        let g = Grid1D::<f64>::symmetric_uniform(3.0, 50);
        for i in 0..g.len() {
            let j = g.reflection_index(i).unwrap();
            assert_eq!(g.points()[j], -g.points()[i]);
        }
    }

    #[test]
    fn radial_grid_excludes_origin() {
        let g = Grid1D::<f64>::radial_uniform(2.0, 10);
        assert!(g.points()[0] > 0.0);
        assert!((g.points()[0] - 0.1).abs() < 1e-15);
        assert!(g.reflection_index(0).is_err());
    }

    #[test]
    fn angular_grid_permutations_are_exact() {
        let g = AngularGrid::<f64>::new(16, 24).unwrap();
        let pi = std::f64::consts::PI;
        for (j, &p) in g.phi().iter().enumerate() {
            let r1 = g.perm_r1()[j];
            let want = (pi - p).rem_euclid(2.0 * pi);
            assert!((g.phi()[r1] - want).abs() < 1e-12, "r1 at {j}");
            let r2 = g.perm_r2()[j];
            let want = (-p).rem_euclid(2.0 * pi);
            assert!((g.phi()[r2] - want).abs() < 1e-12, "r2 at {j}");
        }
        for (i, &t) in g.theta().iter().enumerate() {
            assert!((g.theta()[g.perm_r3()[i]] - (pi - t)).abs() < 1e-12);
        }
    }

    #[test]
    fn angular_grid_rejects_incompatible_counts() {
        assert!(AngularGrid::<f64>::new(15, 24).is_err());
        assert!(AngularGrid::<f64>::new(16, 26).is_err());
    }

    #[test]
    fn field_inner_product_uses_weights() {
        let g = Grid1D::<f64>::radial_uniform(1.0, 400);
        let f = GridField::from_real_fn(&g, |r| r);
        // integral of r^2 on (0,1)
        let v = f.inner(&f).unwrap();
        assert!((v.re - 1.0 / 3.0).abs() < 1e-6);
    }
}
