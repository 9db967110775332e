//! Model parameters, parity sectors, quantum numbers and the closed-form
//! constants of the spectrum.
//!
//! The deformation enters through three reflection couplings mu_j; the
//! angular barrier through the couplings a (azimuthal) and b (polar). Every
//! derived constant below is a pure function of these inputs:
//!
//! ```text
//! delta  = mu1 + mu2 + mu3 + 1
//! alpha  = sqrt((mu2 - e2/2)^2 + 2a/hbar^2)
//! m^2    = (2 n_phi + 1 + mu1 - e1/2 + alpha)^2 - (mu1 + mu2)^2
//! beta   = sqrt(m^2 + b/hbar^2 + (mu1 + mu2)^2)
//! lambda = (2 n_theta + 1 + mu3 - e3/2 + beta)^2 - b/hbar^2 - (1/2 + mu1 + mu2 + mu3)^2
//! sigma  = sqrt(1/4 + delta(delta - 1) + lambda)
//! E      = hbar (2n + sigma + 1)
//! ```

use crate::error::{Error, Result};
use crate::real::{cast, Real};

/// Reflection eigenvalue, +1 or -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    #[inline]
    pub fn sign<T: Real>(self) -> T {
        match self {
            Parity::Even => T::one(),
            Parity::Odd => -T::one(),
        }
    }

    #[inline]
    pub fn sign_i8(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn from_sign(s: i8) -> Result<Self> {
        match s {
            1 => Ok(Parity::Even),
            -1 => Ok(Parity::Odd),
            other => Err(Error::Domain {
                context: "parity",
                message: format!("parity must be +1 or -1, got {other}"),
            }),
        }
    }

    /// Exponent (1 - e)/2, i.e. 0 for even and 1 for odd.
    #[inline]
    pub fn exponent(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// Simultaneous eigenvalues of the three reflections on a separable state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParitySector {
    pub e1: Parity,
    pub e2: Parity,
    pub e3: Parity,
}

impl ParitySector {
    pub fn new(e1: Parity, e2: Parity, e3: Parity) -> Self {
        Self { e1, e2, e3 }
    }

    pub fn from_signs(e1: i8, e2: i8, e3: i8) -> Result<Self> {
        Ok(Self {
            e1: Parity::from_sign(e1)?,
            e2: Parity::from_sign(e2)?,
            e3: Parity::from_sign(e3)?,
        })
    }

    /// All eight sectors in a fixed (deterministic) order.
    pub fn all() -> impl Iterator<Item = ParitySector> {
        const SIGNS: [Parity; 2] = [Parity::Even, Parity::Odd];
        SIGNS.into_iter().flat_map(move |e1| {
            SIGNS
                .into_iter()
                .flat_map(move |e2| SIGNS.into_iter().map(move |e3| ParitySector::new(e1, e2, e3)))
        })
    }
}

/// Radial, polar and azimuthal excitation indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantumNumbers {
    pub n: u32,
    pub n_theta: u32,
    pub n_phi: u32,
}

impl QuantumNumbers {
    pub fn new(n: u32, n_theta: u32, n_phi: u32) -> Self {
        Self { n, n_theta, n_phi }
    }
}

/// Deformation parameters, angular couplings and the Planck constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T: Real> {
    pub mu: [T; 3],
    pub a: T,
    pub b: T,
    pub hbar: T,
}

impl<T: Real> ModelParams<T> {
    /// Validates mu_j > -1/2 (normalizable measure), delta > 0 and hbar > 0.
    pub fn new(mu: [T; 3], a: T, b: T, hbar: T) -> Result<Self> {
        let half = cast::<T>(0.5);
        for (j, &m) in mu.iter().enumerate() {
            if !(m > -half) || !m.is_finite() {
                return Err(Error::Domain {
                    context: "model params",
                    message: format!("mu{} must exceed -1/2, got {m}", j + 1),
                });
            }
        }
        if !(hbar > T::zero()) {
            return Err(Error::Domain {
                context: "model params",
                message: format!("hbar must be positive, got {hbar}"),
            });
        }
        let params = Self { mu, a, b, hbar };
        if !(compute_delta(&params) > T::zero()) {
            return Err(Error::Domain {
                context: "model params",
                message: format!("delta must be positive, got {}", compute_delta(&params)),
            });
        }
        Ok(params)
    }

    /// Undeformed oscillator without angular barrier, hbar = 1.
    pub fn undeformed() -> Self {
        Self {
            mu: [T::zero(); 3],
            a: T::zero(),
            b: T::zero(),
            hbar: T::one(),
        }
    }
}

/// delta = mu1 + mu2 + mu3 + 1.
#[inline]
pub fn compute_delta<T: Real>(params: &ModelParams<T>) -> T {
    params.mu[0] + params.mu[1] + params.mu[2] + T::one()
}

/// alpha = sqrt((mu2 - e2/2)^2 + 2a/hbar^2), the azimuthal exponent shift.
pub fn compute_alpha<T: Real>(params: &ModelParams<T>, sector: &ParitySector) -> Result<T> {
    let half = cast::<T>(0.5);
    let base = params.mu[1] - sector.e2.sign::<T>() * half;
    let radicand = base * base + cast::<T>(2.0) * params.a / (params.hbar * params.hbar);
    if radicand < T::zero() {
        return Err(Error::NegativeRadicand {
            quantity: "alpha",
            value: radicand.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(radicand.sqrt())
}

/// Azimuthal separation constant m^2 for the given excitation and sector.
pub fn compute_m_squared<T: Real>(
    nq: &QuantumNumbers,
    params: &ModelParams<T>,
    sector: &ParitySector,
    alpha: T,
) -> T {
    let half = cast::<T>(0.5);
    let base = cast::<T>(2.0 * f64::from(nq.n_phi) + 1.0) + params.mu[0]
        - sector.e1.sign::<T>() * half
        + alpha;
    let mu12 = params.mu[0] + params.mu[1];
    base * base - mu12 * mu12
}

/// beta = sqrt(m^2 + b/hbar^2 + (mu1 + mu2)^2), the polar exponent shift.
pub fn compute_beta<T: Real>(m_squared: T, params: &ModelParams<T>) -> Result<T> {
    let mu12 = params.mu[0] + params.mu[1];
    let radicand = m_squared + params.b / (params.hbar * params.hbar) + mu12 * mu12;
    if radicand < T::zero() {
        return Err(Error::NegativeRadicand {
            quantity: "beta",
            value: radicand.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(radicand.sqrt())
}

/// Polar separation constant lambda.
pub fn compute_lambda<T: Real>(
    nq: &QuantumNumbers,
    params: &ModelParams<T>,
    sector: &ParitySector,
    beta: T,
) -> T {
    let half = cast::<T>(0.5);
    let base = cast::<T>(2.0 * f64::from(nq.n_theta) + 1.0) + params.mu[2]
        - sector.e3.sign::<T>() * half
        + beta;
    let s = half + params.mu[0] + params.mu[1] + params.mu[2];
    base * base - params.b / (params.hbar * params.hbar) - s * s
}

/// sigma = sqrt(1/4 + delta(delta - 1) + lambda), the radial exponent.
pub fn compute_sigma<T: Real>(delta: T, lambda: T) -> Result<T> {
    let radicand = cast::<T>(0.25) + delta * (delta - T::one()) + lambda;
    if radicand < T::zero() {
        return Err(Error::NegativeRadicand {
            quantity: "sigma",
            value: radicand.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(radicand.sqrt())
}

/// Invariant eigenvalue E = hbar (2n + sigma + 1). Radial index starts at 0.
#[inline]
pub fn invariant_eigenvalue<T: Real>(n: u32, sigma: T, hbar: T) -> T {
    hbar * (cast::<T>(2.0 * f64::from(n)) + sigma + T::one())
}

/// The full derived-constant bundle for one (sector, quantum number) choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConstants<T: Real> {
    pub delta: T,
    pub alpha: T,
    pub m_squared: T,
    pub beta: T,
    pub lambda: T,
    pub sigma: T,
    pub energy: T,
}

impl<T: Real> SpectralConstants<T> {
    /// Chains the closed-form constants; fails eagerly on the first
    /// negative radicand, naming the offending quantity.
    pub fn compute(
        params: &ModelParams<T>,
        sector: &ParitySector,
        nq: &QuantumNumbers,
    ) -> Result<Self> {
        let delta = compute_delta(params);
        let alpha = compute_alpha(params, sector)?;
        let m_squared = compute_m_squared(nq, params, sector, alpha);
        let beta = compute_beta(m_squared, params)?;
        let lambda = compute_lambda(nq, params, sector, beta);
        let sigma = compute_sigma(delta, lambda)?;
        let energy = invariant_eigenvalue(nq.n, sigma, params.hbar);
        Ok(Self {
            delta,
            alpha,
            m_squared,
            beta,
            lambda,
            sigma,
            energy,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(mu: [f64; 3], a: f64, b: f64) -> ModelParams<f64> {
        ModelParams::new(mu, a, b, 1.0).unwrap()
    }

    fn sector(e1: i8, e2: i8, e3: i8) -> ParitySector {
        ParitySector::from_signs(e1, e2, e3).unwrap()
    }

    #[test]
    fn delta_sums_deformations() {
        assert_eq!(compute_delta(&p([0.0; 3], 0.0, 0.0)), 1.0);
        assert_eq!(compute_delta(&p([0.5, 0.5, 0.5], 0.0, 0.0)), 2.5);
        assert_relative_eq!(compute_delta(&p([0.2, 0.3, 0.4], 0.0, 0.0)), 1.9);
    }

    #[test]
    fn alpha_examples() {
        let s = sector(1, 1, 1);
        assert_relative_eq!(compute_alpha(&p([0.0; 3], 0.0, 0.0), &s).unwrap(), 0.5);
        assert_relative_eq!(
            compute_alpha(&p([0.0, 0.5, 0.0], 0.0, 0.0), &s).unwrap(),
            0.0
        );
        // 0.64 + 0.36 = 1
        assert_relative_eq!(
            compute_alpha(&p([0.0, 0.3, 0.0], 0.18, 0.0), &sector(1, -1, 1)).unwrap(),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn alpha_rejects_strongly_negative_coupling() {
        let err = compute_alpha(&p([0.0; 3], -1.0, 0.0), &sector(1, 1, 1)).unwrap_err();
        match err {
            Error::NegativeRadicand { quantity, value } => {
                assert_eq!(quantity, "alpha");
                assert!(value < 0.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn m_squared_reduces_to_integer_azimuthal_numbers() {
        let params = ModelParams::<f64>::undeformed();
        let cases = [
            (0u32, 1i8, 1.0),
            (0, -1, 4.0),
            (1, 1, 9.0),
        ];
        for (n_phi, e1, want) in cases {
            let nq = QuantumNumbers::new(0, 0, n_phi);
            let got = compute_m_squared(&nq, &params, &sector(e1, 1, 1), 0.5);
            assert_relative_eq!(got, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn beta_examples() {
        assert_relative_eq!(compute_beta(1.0, &p([0.0; 3], 0.0, 0.0)).unwrap(), 1.0);
        assert_relative_eq!(
            compute_beta(4.0, &p([0.5, 0.5, 0.0], 0.0, 0.0)).unwrap(),
            5f64.sqrt(),
            epsilon = 1e-14
        );
        assert_relative_eq!(compute_beta(1.0, &p([0.0; 3], 0.0, 3.0)).unwrap(), 2.0);
        assert!(matches!(
            compute_beta(1.0, &p([0.0; 3], 0.0, -3.0)),
            Err(Error::NegativeRadicand { quantity: "beta", .. })
        ));
    }

    #[test]
    fn lambda_reduces_to_angular_momentum_eigenvalues() {
        let params = ModelParams::<f64>::undeformed();
        let cases = [(0u32, 1i8, 2.0), (0, -1, 6.0), (1, 1, 12.0)];
        for (n_theta, e3, want) in cases {
            let nq = QuantumNumbers::new(0, n_theta, 0);
            let got = compute_lambda(&nq, &params, &sector(1, 1, e3), 1.0);
            assert_relative_eq!(got, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn sigma_and_energy_examples() {
        assert_relative_eq!(compute_sigma(1.0, 2.0).unwrap(), 1.5);
        assert_relative_eq!(compute_sigma(1.0, 0.0).unwrap(), 0.5);
        assert_relative_eq!(compute_sigma(2.5, 0.0).unwrap(), 2.0);
        assert_relative_eq!(invariant_eigenvalue(0, 1.5, 1.0), 2.5);
        assert_relative_eq!(invariant_eigenvalue(2, 0.5, 1.0), 5.5);
        assert_relative_eq!(invariant_eigenvalue(0, 0.5, 1.0), 1.5);
    }

    #[test]
    fn undeformed_reduction_reproduces_oscillator_spectrum() {
        // For mu = 0, a = b = 0: lambda = l(l+1) with l = 2 n_theta + m + (1-e3)/2,
        // m = 2 n_phi + 1 + (1-e1)/2, hence E = hbar (2n + l + 3/2).
        let params = ModelParams::<f64>::undeformed();
        for sec in ParitySector::all() {
            for n in 0..3u32 {
                for n_theta in 0..4u32 {
                    for n_phi in 0..4u32 {
                        let nq = QuantumNumbers::new(n, n_theta, n_phi);
                        let c = SpectralConstants::compute(&params, &sec, &nq).unwrap();
                        let m = 2 * n_phi + 1 + sec.e1.exponent();
                        let l = 2 * n_theta + m + sec.e3.exponent();
                        let lf = f64::from(l);
                        assert_relative_eq!(c.m_squared, f64::from(m * m), epsilon = 1e-12);
                        assert_relative_eq!(c.lambda, lf * (lf + 1.0), epsilon = 1e-12);
                        assert_relative_eq!(c.sigma, lf + 0.5, epsilon = 1e-12);
                        assert_relative_eq!(
                            c.energy,
                            2.0 * f64::from(n) + lf + 1.5,
                            epsilon = 1e-12
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn constants_nondecreasing_in_quantum_numbers() {
        let params = p([0.3, 0.4, 0.2], 0.1, 0.5);
        let sec = sector(1, 1, 1);
        let at = |n, n_theta, n_phi| {
            SpectralConstants::compute(&params, &sec, &QuantumNumbers::new(n, n_theta, n_phi))
                .unwrap()
        };
        for k in 0..6u32 {
            assert!(at(0, 0, k + 1).m_squared >= at(0, 0, k).m_squared);
            assert!(at(0, 0, k + 1).beta >= at(0, 0, k).beta);
            assert!(at(0, k + 1, 0).lambda >= at(0, k, 0).lambda);
            assert!(at(0, k + 1, 0).sigma >= at(0, k, 0).sigma);
            assert!(at(k + 1, 0, 0).energy >= at(k, 0, 0).energy);
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(ModelParams::new([-0.5, 0.0, 0.0], 0.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new([0.0; 3], 0.0, 0.0, 0.0).is_err());
        assert!(ParitySector::from_signs(0, 1, 1).is_err());
    }

    #[test]
    fn eager_validation_names_the_radicand() {
        let params = p([0.3, 0.4, 0.2], 0.1, -3.0);
        let err = SpectralConstants::compute(
            &params,
            &sector(1, 1, 1),
            &QuantumNumbers::new(0, 0, 0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NegativeRadicand { quantity: "beta", .. }));
    }
}
