//! Closed-form azimuthal and polar eigenfunctions on the fundamental domain
//! (0, pi/2), parity extension to the full angles, and residual checks of the
//! separated eigenvalue equations.
//!
//! Conventions:
//!
//! ```text
//! Phi(phi)     = C_phi cos(phi)^((1-e1)/2) sin(phi)^(1/2 - mu2 + alpha)
//!                  P_{n_phi}^(alpha, mu1 - e1/2)(cos 2 phi)
//! Theta(theta) = C_th  cos(theta)^((1-e3)/2) sin(theta)^(beta - mu1 - mu2)
//!                  P_{n_theta}^(beta, mu3 - e3/2)(cos 2 theta)
//! ```
//!
//! The azimuthal equation, with reflections replaced by their sector
//! eigenvalues, reads
//!
//! ```text
//! -Phi'' - 2 (mu2 cot - mu1 tan) Phi'
//!   + [ mu1 (1 - e1)/cos^2 + (mu2 (1 - e2) + 2a/hbar^2)/sin^2 ] Phi = m^2 Phi
//! ```
//!
//! and the polar one carries the azimuthal constant through:
//!
//! ```text
//! -Theta'' - 2 [(1/2 + mu1 + mu2) cot - mu3 tan] Theta'
//!   + [ mu3 (1 - e3)/cos^2 + (b/hbar^2) cot^2 + m^2/sin^2 ] Theta = lambda Theta
//! ```
//!
//! Weights for normalization come from the full measure, theta carrying the
//! spherical Jacobian: |sin phi|^(2 mu2) |cos phi|^(2 mu1) d phi and
//! |sin theta|^(2 mu1 + 2 mu2 + 1) |cos theta|^(2 mu3) d theta.

use crate::error::{Error, Result};
use crate::params::{
    compute_alpha, ModelParams, ParitySector, QuantumNumbers, SpectralConstants,
};
use crate::quadrature::gauss_legendre_on;
use crate::real::{cast, cast_usize, Real};
use crate::specfun::jacobi;

/// Fraction of nodes excluded at each end of a residual scan. The closed
/// forms carry fractional powers of the coordinate at the domain endpoints,
/// where finite-difference stencils cannot hold their interior order.
pub const RESIDUAL_MARGIN: f64 = 0.1;

/// Which angular factor an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularFactor {
    Theta,
    Phi,
}

/// One separable angular mode: quantum numbers, sector, derived constants
/// and the numerically fixed normalization of each factor.
#[derive(Debug, Clone)]
pub struct AngularMode<T: Real> {
    pub params: ModelParams<T>,
    pub sector: ParitySector,
    pub nq: QuantumNumbers,
    pub constants: SpectralConstants<T>,
    pub c_theta: T,
    pub c_phi: T,
}

impl<T: Real> AngularMode<T> {
    pub fn new(
        params: &ModelParams<T>,
        sector: &ParitySector,
        nq: &QuantumNumbers,
    ) -> Result<Self> {
        let constants = SpectralConstants::compute(params, sector, nq)?;
        Self::with_constants(params, sector, nq, constants)
    }

    /// Builds a mode from externally supplied constants, checking they are
    /// consistent with the sector.
    pub fn with_constants(
        params: &ModelParams<T>,
        sector: &ParitySector,
        nq: &QuantumNumbers,
        constants: SpectralConstants<T>,
    ) -> Result<Self> {
        let alpha = compute_alpha(params, sector)?;
        if (alpha - constants.alpha).abs() > cast::<T>(1e-12) * (T::one() + alpha.abs()) {
            return Err(Error::InconsistentParity(format!(
                "alpha = {} does not match sector e2 (expected {})",
                constants.alpha, alpha
            )));
        }
        let half = cast::<T>(0.5);
        let phi_exp = half - params.mu[1] + constants.alpha;
        let theta_exp = constants.beta - params.mu[0] - params.mu[1];
        if !(phi_exp > -half) || !(theta_exp > -half) {
            return Err(Error::Domain {
                context: "angular mode",
                message: format!(
                    "boundary exponents not integrable: phi {phi_exp}, theta {theta_exp}"
                ),
            });
        }
        let mut mode = Self {
            params: *params,
            sector: *sector,
            nq: *nq,
            constants,
            c_theta: T::one(),
            c_phi: T::one(),
        };
        let (c_theta, c_phi) = mode.normalize()?;
        mode.c_theta = c_theta;
        mode.c_phi = c_phi;
        Ok(mode)
    }

    /// Measure weight of the phi integral.
    pub fn phi_weight(&self, phi: T) -> T {
        let two = cast::<T>(2.0);
        phi.sin().abs().powf(two * self.params.mu[1]) * phi.cos().abs().powf(two * self.params.mu[0])
    }

    /// Measure weight of the theta integral (includes the spherical Jacobian).
    pub fn theta_weight(&self, theta: T) -> T {
        let two = cast::<T>(2.0);
        theta
            .sin()
            .abs()
            .powf(two * (self.params.mu[0] + self.params.mu[1]) + T::one())
            * theta.cos().abs().powf(two * self.params.mu[2])
    }

    fn normalize(&self) -> Result<(T, T)> {
        // Full-domain norms reduce to the fundamental domain: the integrand
        // is reflection invariant, giving factors 2 (theta) and 4 (phi).
        let theta_norm = converged_quadrature(|n| {
            let (x, w) = gauss_legendre_on(n, T::zero(), T::FRAC_PI_2());
            let mut acc = T::zero();
            for (&t, &wt) in x.iter().zip(&w) {
                let v = self.eval_theta_raw(t)?;
                acc = acc + wt * v * v * self.theta_weight(t);
            }
            Ok(acc * cast::<T>(2.0))
        })?;
        let phi_norm = converged_quadrature(|n| {
            let (x, w) = gauss_legendre_on(n, T::zero(), T::FRAC_PI_2());
            let mut acc = T::zero();
            for (&p, &wp) in x.iter().zip(&w) {
                let v = self.eval_phi_raw(p)?;
                acc = acc + wp * v * v * self.phi_weight(p);
            }
            Ok(acc * cast::<T>(4.0))
        })?;
        Ok((T::one() / theta_norm.sqrt(), T::one() / phi_norm.sqrt()))
    }

    fn eval_phi_raw(&self, phi: T) -> Result<T> {
        let half = cast::<T>(0.5);
        let c = self.sector.e1.exponent();
        let s = half - self.params.mu[1] + self.constants.alpha;
        let q = self.params.mu[0] - self.sector.e1.sign::<T>() * half;
        let poly = jacobi(self.nq.n_phi, self.constants.alpha, q, (phi + phi).cos())?;
        let cos_pow = if c == 0 { T::one() } else { phi.cos() };
        Ok(cos_pow * phi.sin().powf(s) * poly)
    }

    fn eval_theta_raw(&self, theta: T) -> Result<T> {
        let half = cast::<T>(0.5);
        let c = self.sector.e3.exponent();
        let s = self.constants.beta - self.params.mu[0] - self.params.mu[1];
        let q = self.params.mu[2] - self.sector.e3.sign::<T>() * half;
        let poly = jacobi(self.nq.n_theta, self.constants.beta, q, (theta + theta).cos())?;
        let cos_pow = if c == 0 { T::one() } else { theta.cos() };
        Ok(cos_pow * theta.sin().powf(s) * poly)
    }

    /// Normalized azimuthal factor on the open fundamental domain (0, pi/2).
    pub fn eval_phi(&self, phi: T) -> Result<T> {
        if !(phi > T::zero() && phi < T::FRAC_PI_2()) {
            return Err(Error::Domain {
                context: "eval_phi",
                message: format!("phi = {phi} outside (0, pi/2); use the parity extension"),
            });
        }
        Ok(self.c_phi * self.eval_phi_raw(phi)?)
    }

    /// Normalized polar factor on the open fundamental domain (0, pi/2).
    pub fn eval_theta(&self, theta: T) -> Result<T> {
        if !(theta > T::zero() && theta < T::FRAC_PI_2()) {
            return Err(Error::Domain {
                context: "eval_theta",
                message: format!("theta = {theta} outside (0, pi/2); use the parity extension"),
            });
        }
        Ok(self.c_theta * self.eval_theta_raw(theta)?)
    }

    /// Azimuthal factor on (0, 2 pi), extended by the sector parities
    /// Phi(pi - phi) = e1 Phi(phi) and Phi(-phi) = e2 Phi(phi).
    pub fn eval_phi_extended(&self, phi: T) -> Result<T> {
        let pi = T::PI();
        let tau = pi + pi;
        let mut x = phi;
        let mut sign = T::one();
        if x < T::zero() || x > tau {
            x = x - tau * (x / tau).floor();
        }
        if x > pi {
            // phi -> 2 pi - phi is the reflection phi -> -phi
            x = tau - x;
            sign = sign * self.sector.e2.sign::<T>();
        }
        if x > T::FRAC_PI_2() {
            x = pi - x;
            sign = sign * self.sector.e1.sign::<T>();
        }
        Ok(sign * self.c_phi * self.eval_phi_raw(x)?)
    }

    /// Polar factor on (0, pi), extended by Theta(pi - theta) = e3 Theta(theta).
    pub fn eval_theta_extended(&self, theta: T) -> Result<T> {
        let mut x = theta;
        let mut sign = T::one();
        if x > T::FRAC_PI_2() {
            x = T::PI() - x;
            sign = self.sector.e3.sign::<T>();
        }
        Ok(sign * self.c_theta * self.eval_theta_raw(x)?)
    }
}

fn converged_quadrature<T: Real>(eval: impl Fn(usize) -> Result<T>) -> Result<T> {
    let mut n = 128;
    let mut prev = eval(n)?;
    for _ in 0..5 {
        n *= 2;
        let next = eval(n)?;
        if (next - prev).abs() <= cast::<T>(1e-10) * next.abs().max(T::one()) {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// Extends fundamental-domain samples to the full domain by sector parity.
///
/// For `Phi`, `samples` are taken on the first quarter of a uniform
/// half-offset grid over (0, 2 pi) and the result covers all four quarters;
/// for `Theta`, on the first half of a grid over (0, pi).
pub fn extend_by_parity<T: Real>(
    mode: &AngularMode<T>,
    samples: &[T],
    which: AngularFactor,
) -> Result<Vec<T>> {
    // guard against modes whose constants were built for another sector
    let alpha = compute_alpha(&mode.params, &mode.sector)?;
    if (alpha - mode.constants.alpha).abs() > cast::<T>(1e-12) * (T::one() + alpha.abs()) {
        return Err(Error::InconsistentParity(
            "mode constants belong to a different e2 sector".into(),
        ));
    }
    let m = samples.len();
    match which {
        AngularFactor::Theta => {
            let e3 = mode.sector.e3.sign::<T>();
            let mut out = Vec::with_capacity(2 * m);
            out.extend_from_slice(samples);
            for i in m..2 * m {
                out.push(e3 * samples[2 * m - 1 - i]);
            }
            Ok(out)
        }
        AngularFactor::Phi => {
            let e1 = mode.sector.e1.sign::<T>();
            let e2 = mode.sector.e2.sign::<T>();
            let mut out = Vec::with_capacity(4 * m);
            out.extend_from_slice(samples);
            for j in m..2 * m {
                out.push(e1 * samples[2 * m - 1 - j]);
            }
            for j in 0..m {
                out.push(e1 * e2 * samples[j]);
            }
            for j in 3 * m..4 * m {
                out.push(e2 * samples[4 * m - 1 - j]);
            }
            Ok(out)
        }
    }
}

/// Uniform half-offset nodes on (0, end).
fn fundamental_nodes<T: Real>(end: T, n: usize) -> (Vec<T>, T) {
    let h = end / cast_usize::<T>(n);
    (
        (0..n)
            .map(|k| (cast_usize::<T>(k) + cast::<T>(0.5)) * h)
            .collect(),
        h,
    )
}

fn windowed_max_residual<T: Real>(op_minus_eig: &[T], reference: T, n: usize) -> T {
    let lo = (n as f64 * RESIDUAL_MARGIN) as usize;
    let hi = n - lo;
    op_minus_eig[lo..hi]
        .iter()
        .fold(T::zero(), |acc, &v| acc.max(v.abs()))
        / reference
}

/// Max normalized residual of the azimuthal equation over the interior of a
/// `n_nodes` fundamental-domain grid, with an optional bias added to the
/// eigenvalue (fault injection for negative controls).
pub fn residual_phi_biased<T: Real>(
    mode: &AngularMode<T>,
    n_nodes: usize,
    eigenvalue_bias: T,
) -> Result<T> {
    let params = &mode.params;
    let (nodes, _h) = fundamental_nodes(T::FRAC_PI_2(), n_nodes);
    let f: Result<Vec<T>> = nodes.iter().map(|&p| mode.eval_phi(p)).collect();
    let f = f?;
    let diff = crate::fd::DiffOp::new(&nodes, crate::fd::Topology::Bounded);
    let d1 = diff.d1(&f);
    let d2 = diff.d2(&f);
    let [mu1, mu2, _] = params.mu;
    let e1 = mode.sector.e1.sign::<T>();
    let e2 = mode.sector.e2.sign::<T>();
    let two = cast::<T>(2.0);
    let m2 = mode.constants.m_squared + eigenvalue_bias;
    let h2 = params.hbar * params.hbar;
    let mut resid = Vec::with_capacity(n_nodes);
    let mut fmax = T::zero();
    for (k, &p) in nodes.iter().enumerate() {
        let (sp, cp) = (p.sin(), p.cos());
        let op = -d2[k] - two * (mu2 * cp / sp - mu1 * sp / cp) * d1[k]
            + (mu1 * (T::one() - e1) / (cp * cp)
                + (mu2 * (T::one() - e2) + two * params.a / h2) / (sp * sp))
                * f[k];
        resid.push(op - m2 * f[k]);
        fmax = fmax.max(f[k].abs());
    }
    Ok(windowed_max_residual(&resid, fmax, n_nodes))
}

/// Max normalized residual of the azimuthal equation.
pub fn residual_phi<T: Real>(mode: &AngularMode<T>, n_nodes: usize) -> Result<T> {
    residual_phi_biased(mode, n_nodes, T::zero())
}

/// Max normalized residual of the polar equation (with eigenvalue bias knob).
pub fn residual_theta_biased<T: Real>(
    mode: &AngularMode<T>,
    n_nodes: usize,
    eigenvalue_bias: T,
) -> Result<T> {
    let params = &mode.params;
    let (nodes, _h) = fundamental_nodes(T::FRAC_PI_2(), n_nodes);
    let f: Result<Vec<T>> = nodes.iter().map(|&t| mode.eval_theta(t)).collect();
    let f = f?;
    let diff = crate::fd::DiffOp::new(&nodes, crate::fd::Topology::Bounded);
    let d1 = diff.d1(&f);
    let d2 = diff.d2(&f);
    let [mu1, mu2, mu3] = params.mu;
    let e3 = mode.sector.e3.sign::<T>();
    let two = cast::<T>(2.0);
    let half = cast::<T>(0.5);
    let lambda = mode.constants.lambda + eigenvalue_bias;
    let m2 = mode.constants.m_squared;
    let h2 = params.hbar * params.hbar;
    let mut resid = Vec::with_capacity(n_nodes);
    let mut fmax = T::zero();
    for (k, &t) in nodes.iter().enumerate() {
        let (st, ct) = (t.sin(), t.cos());
        let cot = ct / st;
        let op = -d2[k] - two * ((half + mu1 + mu2) * cot - mu3 * st / ct) * d1[k]
            + (mu3 * (T::one() - e3) / (ct * ct) + params.b / h2 * cot * cot + m2 / (st * st))
                * f[k];
        resid.push(op - lambda * f[k]);
        fmax = fmax.max(f[k].abs());
    }
    Ok(windowed_max_residual(&resid, fmax, n_nodes))
}

/// Max normalized residual of the polar equation.
pub fn residual_theta<T: Real>(mode: &AngularMode<T>, n_nodes: usize) -> Result<T> {
    residual_theta_biased(mode, n_nodes, T::zero())
}
