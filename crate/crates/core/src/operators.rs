//! Discretized reflection-deformed operators on grids.
//!
//! These are the independent oracles: derivatives by 4th-order stencils,
//! reflections by exact node permutation, and the generator algebra
//!
//! ```text
//! T1 = P^2 + hbar^2 (delta(delta-1) + lambda) / r^2
//! T2 = r^2
//! T3 = r P + P r,          P = (hbar/i)(d/dr + delta/r)
//! ```
//!
//! restricted to a fixed angular sector (the angular operator replaced by its
//! eigenvalue hbar^2 lambda). The invariant is the standard quadratic
//! combination I = [ (1/rho^2 + M^2 rho_dot^2) T2 + rho^2 T1 - M rho rho_dot T3 ] / 2.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{AngularField, GridField, GridKind};
use crate::params::{compute_delta, ModelParams};
use crate::real::{cast, Real};

/// The three reflections in spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReflectionAxis {
    /// x1 -> -x1, i.e. phi -> pi - phi.
    R1,
    /// x2 -> -x2, i.e. phi -> -phi.
    R2,
    /// x3 -> -x3, i.e. theta -> pi - theta.
    R3,
}

/// Reflection x -> -x on a symmetric 1D grid; exact node permutation.
pub fn reflect<T: Real>(f: &GridField<T>) -> Result<GridField<T>> {
    let grid = f.grid();
    if grid.kind() != GridKind::Symmetric {
        return Err(Error::AsymmetricGrid("x -> -x on a radial grid"));
    }
    let n = grid.len();
    let values = (0..n).map(|i| f.values()[n - 1 - i]).collect();
    GridField::new(std::sync::Arc::clone(grid), values)
}

/// Reflection of an angular field along one of the three axes.
pub fn reflect_angular<T: Real>(f: &AngularField<T>, axis: ReflectionAxis) -> AngularField<T> {
    let grid = f.grid();
    let (nt, np) = (grid.n_theta(), grid.n_phi());
    let mut out = Vec::with_capacity(nt * np);
    match axis {
        ReflectionAxis::R1 => {
            for i in 0..nt {
                for j in 0..np {
                    out.push(f.at(i, grid.perm_r1()[j]));
                }
            }
        }
        ReflectionAxis::R2 => {
            for i in 0..nt {
                for j in 0..np {
                    out.push(f.at(i, grid.perm_r2()[j]));
                }
            }
        }
        ReflectionAxis::R3 => {
            for i in 0..nt {
                for j in 0..np {
                    out.push(f.at(grid.perm_r3()[i], j));
                }
            }
        }
    }
    AngularField::from_values(grid, out)
}

/// Deformed derivative D f = f' + (mu/x)(f(x) - f(-x)) on a symmetric grid.
///
/// No node sits at x = 0, so the difference quotient is finite everywhere.
pub fn dunkl_derivative<T: Real>(f: &GridField<T>, mu: T) -> Result<GridField<T>> {
    let reflected = reflect(f)?;
    let deriv = f.derivative();
    let grid = f.grid();
    let values = grid
        .points()
        .iter()
        .zip(deriv.values())
        .zip(f.values().iter().zip(reflected.values()))
        .map(|((&x, &df), (&v, &rv))| df + (v - rv) * (mu / x))
        .collect();
    GridField::new(std::sync::Arc::clone(grid), values)
}

/// Radial momentum P f = (hbar/i)(f' + delta f / r).
pub fn radial_momentum<T: Real>(f: &GridField<T>, delta: T, hbar: T) -> GridField<T> {
    debug_assert_eq!(f.grid().kind(), GridKind::Radial);
    let deriv = f.grid().diff().d1(f.values());
    let minus_i_hbar = Complex::new(T::zero(), -hbar);
    let values = f
        .grid()
        .points()
        .iter()
        .zip(f.values())
        .zip(deriv)
        .map(|((&r, &v), df)| (df + v * (delta / r)) * minus_i_hbar)
        .collect();
    GridField::new(std::sync::Arc::clone(f.grid()), values).expect("same grid")
}

/// Angular barrier U(theta, phi) = (b/2) cot^2 theta + a / (sin^2 theta sin^2 phi).
pub fn angular_potential<T: Real>(params: &ModelParams<T>, theta: T, phi: T) -> T {
    let (st, ct) = (theta.sin(), theta.cos());
    let sp = phi.sin();
    params.b * cast::<T>(0.5) * (ct / st) * (ct / st) + params.a / (st * st * sp * sp)
}

/// Full deformed angular momentum square applied on an angular grid.
///
/// Derivatives are 4th-order stencils (periodic in phi); the reflection terms
/// are exact node permutations.
pub fn dunkl_angular_momentum_sq<T: Real>(
    f: &AngularField<T>,
    params: &ModelParams<T>,
    hbar: T,
) -> AngularField<T> {
    let grid = f.grid();
    let (nt, np) = (grid.n_theta(), grid.n_phi());
    let [mu1, mu2, mu3] = params.mu;
    let half = cast::<T>(0.5);
    let two = cast::<T>(2.0);

    let r1 = reflect_angular(f, ReflectionAxis::R1);
    let r2 = reflect_angular(f, ReflectionAxis::R2);
    let r3 = reflect_angular(f, ReflectionAxis::R3);

    // phi derivatives row by row
    let mut d1_phi = Vec::with_capacity(nt * np);
    let mut d2_phi = Vec::with_capacity(nt * np);
    for i in 0..nt {
        let row = &f.values()[i * np..(i + 1) * np];
        d1_phi.extend(grid.dphi().d1(row));
        d2_phi.extend(grid.dphi().d2(row));
    }
    // theta derivatives column by column
    let mut d1_theta = vec![Complex::new(T::zero(), T::zero()); nt * np];
    let mut d2_theta = d1_theta.clone();
    let mut col = vec![Complex::new(T::zero(), T::zero()); nt];
    for j in 0..np {
        for i in 0..nt {
            col[i] = f.at(i, j);
        }
        for (i, v) in grid.dtheta().d1(&col).into_iter().enumerate() {
            d1_theta[i * np + j] = v;
        }
        for (i, v) in grid.dtheta().d2(&col).into_iter().enumerate() {
            d2_theta[i * np + j] = v;
        }
    }

    let mut out = Vec::with_capacity(nt * np);
    for (i, &theta) in grid.theta().iter().enumerate() {
        let (st, ct) = (theta.sin(), theta.cos());
        let cot_t = ct / st;
        let tan_t = st / ct;
        let inv_sin2_t = T::one() / (st * st);
        let inv_cos2_t = T::one() / (ct * ct);
        for (j, &phi) in grid.phi().iter().enumerate() {
            let k = i * np + j;
            let (sp, cp) = (phi.sin(), phi.cos());
            let cot_p = cp / sp;
            let tan_p = sp / cp;

            let theta_part = d2_theta[k]
                + d1_theta[k] * (two * ((half + mu1 + mu2) * cot_t - mu3 * tan_t))
                - (f.values()[k] - r3.values()[k]) * (mu3 * inv_cos2_t);
            let phi_part = d2_phi[k]
                + d1_phi[k] * (two * (mu2 * cot_p - mu1 * tan_p))
                - (f.values()[k] - r1.values()[k]) * (mu1 / (cp * cp))
                - (f.values()[k] - r2.values()[k]) * (mu2 / (sp * sp));
            out.push((theta_part + phi_part * inv_sin2_t) * (-hbar * hbar));
        }
    }
    AngularField::from_values(grid, out)
}

/// Centrifugal strength hbar^2 (delta(delta-1) + lambda).
#[inline]
fn centrifugal<T: Real>(params: &ModelParams<T>, lambda: T) -> T {
    let delta = compute_delta(params);
    params.hbar * params.hbar * (delta * (delta - T::one()) + lambda)
}

/// T1 f = P^2 f + hbar^2 (delta(delta-1) + lambda) f / r^2.
pub fn apply_t1<T: Real>(f: &GridField<T>, params: &ModelParams<T>, lambda: T) -> GridField<T> {
    let delta = compute_delta(params);
    let c = centrifugal(params, lambda);
    let pf = radial_momentum(f, delta, params.hbar);
    let ppf = radial_momentum(&pf, delta, params.hbar);
    let values = f
        .grid()
        .points()
        .iter()
        .zip(f.values())
        .zip(ppf.values())
        .map(|((&r, &v), &pp)| pp + v * (c / (r * r)))
        .collect();
    GridField::new(std::sync::Arc::clone(f.grid()), values).expect("same grid")
}

/// T2 f = r^2 f.
pub fn apply_t2<T: Real>(f: &GridField<T>) -> GridField<T> {
    f.map(|r, v| v * (r * r))
}

/// T3 f = (r P + P r) f.
pub fn apply_t3<T: Real>(f: &GridField<T>, params: &ModelParams<T>) -> GridField<T> {
    let delta = compute_delta(params);
    let pf = radial_momentum(f, delta, params.hbar);
    let rf = f.map(|r, v| v * r);
    let prf = radial_momentum(&rf, delta, params.hbar);
    pf.map(|r, v| v * r)
        .zip_map(&prf, |a, b| a + b)
        .expect("same grid")
}

/// Invariant I f at auxiliary state (rho, rho_dot) and mass M.
pub fn apply_invariant<T: Real>(
    f: &GridField<T>,
    params: &ModelParams<T>,
    lambda: T,
    rho: T,
    rho_dot: T,
    mass: T,
) -> GridField<T> {
    let half = cast::<T>(0.5);
    let t1 = apply_t1(f, params, lambda);
    let t2 = apply_t2(f);
    let t3 = apply_t3(f, params);
    let c_t2 = T::one() / (rho * rho) + mass * mass * rho_dot * rho_dot;
    let c_t1 = rho * rho;
    let c_t3 = -(mass * rho * rho_dot);
    let mut out = t1.scale(Complex::new(c_t1 * half, T::zero()));
    out = out
        .zip_map(&t2.scale(Complex::new(c_t2 * half, T::zero())), |a, b| a + b)
        .expect("same grid");
    out.zip_map(&t3.scale(Complex::new(c_t3 * half, T::zero())), |a, b| a + b)
        .expect("same grid")
}

/// Hamiltonian H f = T1 f / (2M) + M omega^2 r^2 f / 2 on the fixed sector.
pub fn apply_hamiltonian<T: Real>(
    f: &GridField<T>,
    params: &ModelParams<T>,
    lambda: T,
    mass: T,
    omega: T,
) -> GridField<T> {
    let half = cast::<T>(0.5);
    let t1 = apply_t1(f, params, lambda);
    let kin = t1.scale(Complex::new(half / mass, T::zero()));
    let pot = f.map(|r, v| v * (half * mass * omega * omega * r * r));
    kin.zip_map(&pot, |a, b| a + b).expect("same grid")
}
