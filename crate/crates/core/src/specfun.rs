//! Orthogonal-polynomial and gamma-function kernels.
//!
//! Jacobi and associated Laguerre values are produced by upward three-term
//! recurrence in the degree, which is stable for the parameter ranges used
//! here (p, q, sigma > -1, degrees up to a few tens).

use crate::error::{Error, Result};
use crate::real::{cast, Real};

/// Jacobi polynomial P_n^(p,q)(x).
pub fn jacobi<T: Real>(n: u32, p: T, q: T, x: T) -> Result<T> {
    let neg_one = -T::one();
    if p <= neg_one || q <= neg_one {
        return Err(Error::Domain {
            context: "jacobi",
            message: format!("parameters must exceed -1, got p={p}, q={q}"),
        });
    }
    if n == 0 {
        return Ok(T::one());
    }
    let two = cast::<T>(2.0);
    let mut prev = T::one();
    let mut cur = (p + q + two) * x / two + (p - q) / two;
    for k in 2..=n {
        let kf = cast::<T>(f64::from(k));
        let c = two * kf + p + q;
        let a1 = two * kf * (kf + p + q) * (c - two);
        let a2 = (c - T::one()) * (c * (c - two) * x + p * p - q * q);
        let a3 = two * (kf + p - T::one()) * (kf + q - T::one()) * c;
        let next = (a2 * cur - a3 * prev) / a1;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Associated Laguerre polynomial L_n^sigma(x).
pub fn laguerre<T: Real>(n: u32, sigma: T, x: T) -> Result<T> {
    if sigma <= -T::one() {
        return Err(Error::Domain {
            context: "laguerre",
            message: format!("parameter must exceed -1, got sigma={sigma}"),
        });
    }
    if n == 0 {
        return Ok(T::one());
    }
    let mut prev = T::one();
    let mut cur = T::one() + sigma - x;
    for k in 2..=n {
        let kf = cast::<T>(f64::from(k));
        let next = ((two_k_term(kf, sigma) - x) * cur - (kf - T::one() + sigma) * prev) / kf;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

#[inline]
fn two_k_term<T: Real>(kf: T, sigma: T) -> T {
    kf + kf - T::one() + sigma
}

/// Lanczos coefficients for g = 7, n = 9 (about 15 correct digits).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0.
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    if x <= T::zero() {
        return Err(Error::Domain {
            context: "log_gamma",
            message: format!("argument must be positive, got {x}"),
        });
    }
    // ln Gamma(x) = ln Gamma(x+1) - ln x keeps the Lanczos sum well away
    // from its x -> 0 accuracy cliff.
    if x < T::one() {
        return Ok(log_gamma(x + T::one())? - x.ln());
    }
    let z = x - T::one();
    let mut acc = cast::<T>(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + cast::<T>(c) / (z + cast::<T>(i as f64));
    }
    let t = z + cast::<T>(LANCZOS_G) + cast::<T>(0.5);
    let half_ln_two_pi = cast::<T>(0.918_938_533_204_672_7);
    Ok(half_ln_two_pi + (z + cast::<T>(0.5)) * t.ln() - t + acc.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // Explicit finite-sum formulas, kept independent of the recurrences.
    fn jacobi_sum(n: u32, p: f64, q: f64, x: f64) -> f64 {
        let n = n as i64;
        let mut total = 0.0;
        for s in 0..=n {
            let ln_binom1 = ln_gamma_ref(n as f64 + p + 1.0)
                - ln_gamma_ref(s as f64 + 1.0)
                - ln_gamma_ref(n as f64 + p - s as f64 + 1.0);
            let ln_binom2 = ln_gamma_ref(n as f64 + q + 1.0)
                - ln_gamma_ref((n - s) as f64 + 1.0)
                - ln_gamma_ref(q + s as f64 + 1.0);
            total += (ln_binom1 + ln_binom2).exp()
                * ((x - 1.0) / 2.0).powi((n - s) as i32)
                * ((x + 1.0) / 2.0).powi(s as i32);
        }
        total
    }

    fn laguerre_sum(n: u32, sigma: f64, x: f64) -> f64 {
        let mut total = 0.0;
        let mut factorial = 1.0;
        for k in 0..=n {
            if k > 0 {
                factorial *= k as f64;
            }
            let ln_binom = ln_gamma_ref(n as f64 + sigma + 1.0)
                - ln_gamma_ref(sigma + k as f64 + 1.0)
                - ln_gamma_ref((n - k) as f64 + 1.0);
            total += if k % 2 == 0 { 1.0 } else { -1.0 } * ln_binom.exp() * x.powi(k as i32)
                / factorial;
        }
        total
    }

    // Stirling series with argument shift; independent of the Lanczos path.
    fn ln_gamma_ref(mut x: f64) -> f64 {
        let mut shift = 0.0;
        while x < 12.0 {
            shift -= x.ln();
            x += 1.0;
        }
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        let series = inv / 12.0 - inv * inv2 / 360.0 + inv * inv2 * inv2 / 1260.0
            - inv * inv2 * inv2 * inv2 / 1680.0;
        shift + 0.5 * ((2.0 * std::f64::consts::PI).ln() - x.ln()) + x * (x.ln() - 1.0) + series
    }

    #[test]
    fn jacobi_degree_zero_is_one() {
        assert_eq!(jacobi(0, 0.3f64, -0.2, 0.7).unwrap(), 1.0);
        assert_eq!(jacobi(0, 2.0f32, 1.0, -0.5).unwrap(), 1.0);
    }

    #[test]
    fn jacobi_degree_one_matches_closed_form() {
        // (p+q+2)x/2 + (p-q)/2 at p=q=1, x=0.5
        assert_relative_eq!(jacobi(1, 1.0f64, 1.0, 0.5).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobi_legendre_endpoint() {
        assert_relative_eq!(jacobi(2, 0.0f64, 0.0, 1.0).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(jacobi(7, 0.0f64, 0.0, 1.0).unwrap(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn jacobi_rejects_bad_parameters() {
        assert!(matches!(
            jacobi(2, -1.0f64, 0.0, 0.0),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            jacobi(2, 0.0f64, -1.5, 0.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn laguerre_low_degrees() {
        assert_eq!(laguerre(0, 0.7f64, 3.0).unwrap(), 1.0);
        assert_relative_eq!(laguerre(1, 1.5f64, 2.0).unwrap(), 0.5, epsilon = 1e-14);
        assert_relative_eq!(laguerre(2, 0.0f64, 0.0).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn laguerre_rejects_bad_parameter() {
        assert!(matches!(
            laguerre(1, -1.2f64, 0.5),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn log_gamma_reference_points() {
        assert_relative_eq!(log_gamma(1.0f64).unwrap(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(
            log_gamma(0.5f64).unwrap(),
            std::f64::consts::PI.sqrt().ln(),
            epsilon = 1e-13
        );
        assert_relative_eq!(log_gamma(6.0f64).unwrap(), 120.0f64.ln(), epsilon = 1e-13);
        assert!(log_gamma(0.0f64).is_err());
        assert!(log_gamma(-2.0f64).is_err());
    }

    #[test]
    fn log_gamma_twelve_digits_against_stirling() {
        for &x in &[0.1, 0.23, 1.37, 2.0, 4.5, 11.25, 40.0, 123.456] {
            let got = log_gamma(x).unwrap();
            let want = ln_gamma_ref(x);
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "x={x}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn single_precision_evaluates() {
        let v32 = laguerre(3, 0.5f32, 1.25).unwrap();
        let v64 = laguerre(3, 0.5f64, 1.25).unwrap();
        assert_relative_eq!(f64::from(v32), v64, epsilon = 1e-5);
    }

    proptest! {
        #[test]
        fn jacobi_recurrence_matches_sum(
            n in 0u32..=10,
            p in -0.9f64..4.0,
            q in -0.9f64..4.0,
            x in -1.0f64..1.0,
        ) {
            let rec = jacobi(n, p, q, x).unwrap();
            let sum = jacobi_sum(n, p, q, x);
            prop_assert!((rec - sum).abs() <= 1e-10 * sum.abs().max(1.0));
        }

        #[test]
        fn laguerre_recurrence_matches_sum(
            n in 0u32..=10,
            sigma in -0.9f64..4.0,
            x in 0.0f64..20.0,
        ) {
            let rec = laguerre(n, sigma, x).unwrap();
            let sum = laguerre_sum(n, sigma, x);
            prop_assert!((rec - sum).abs() <= 1e-10 * sum.abs().max(1.0));
        }
    }
}
