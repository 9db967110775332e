//! Time profiles M(t), omega(t), the auxiliary-trajectory integrator and the
//! accumulated phase.
//!
//! The auxiliary function rho solves
//!
//! ```text
//! rho'' + (M'/M) rho' + omega^2(t) rho = 1 / (M^2 rho^3)
//! ```
//!
//! integrated as a first-order system by the classic 4th-order one-step
//! scheme at fixed step, with a step-doubling error estimate kept as a
//! diagnostic. The phase integral int dt / (M rho^2) is accumulated from the
//! stored samples by a 4th-order composite rule.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fd::fd_weights;
use crate::grid::{Grid1D, GridField};
use crate::operators::apply_t3;
use crate::params::{compute_delta, ModelParams};
use crate::real::{cast, Real};

/// Tabulated samples (t, v) with strictly increasing t; evaluation between
/// samples is cubic Hermite with 4th-order stencil slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct Table<T: Real> {
    ts: Vec<T>,
    vs: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> Table<T> {
    pub fn new(ts: Vec<T>, vs: Vec<T>) -> Result<Self> {
        if ts.len() != vs.len() {
            return Err(Error::InvalidTable("column lengths differ".into()));
        }
        if ts.len() < 2 {
            return Err(Error::InvalidTable("need at least two samples".into()));
        }
        if ts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTable("t column must be strictly increasing".into()));
        }
        let n = ts.len();
        let width = n.min(5);
        let mut slopes = Vec::with_capacity(n);
        for i in 0..n {
            let start = i.saturating_sub(width / 2).min(n - width);
            let w = fd_weights(&ts[start..start + width], ts[i], 1);
            let s = w[1]
                .iter()
                .zip(&vs[start..start + width])
                .map(|(&c, &v)| c * v)
                .sum();
            slopes.push(s);
        }
        Ok(Self { ts, vs, slopes })
    }

    /// Parses two-column CSV `t,value`; '#'-prefixed lines are comments.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut ts = Vec::new();
        let mut vs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',');
            let parse = |s: Option<&str>| -> Result<T> {
                s.and_then(|v| v.trim().parse::<f64>().ok())
                    .map(cast::<T>)
                    .ok_or_else(|| {
                        Error::InvalidTable(format!("line {}: expected `t,value`", lineno + 1))
                    })
            };
            ts.push(parse(cols.next())?);
            vs.push(parse(cols.next())?);
        }
        Self::new(ts, vs)
    }

    pub fn times(&self) -> &[T] {
        &self.ts
    }

    pub fn values(&self) -> &[T] {
        &self.vs
    }

    fn locate(&self, t: T) -> Result<usize> {
        let n = self.ts.len();
        if t < self.ts[0] || t > self.ts[n - 1] {
            return Err(Error::Domain {
                context: "table",
                message: format!("t = {t} outside tabulated range"),
            });
        }
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.ts[mid] <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    pub fn eval(&self, t: T) -> Result<T> {
        let i = self.locate(t)?;
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let two = cast::<T>(2.0);
        let three = cast::<T>(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        Ok(h00 * self.vs[i] + h10 * h * self.slopes[i] + h01 * self.vs[i + 1]
            + h11 * h * self.slopes[i + 1])
    }

    pub fn eval_derivative(&self, t: T) -> Result<T> {
        let i = self.locate(t)?;
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let s2 = s * s;
        let two = cast::<T>(2.0);
        let three = cast::<T>(3.0);
        let six = cast::<T>(6.0);
        let d00 = (six * s2 - six * s) / h;
        let d10 = three * s2 - two * two * s + T::one();
        let d01 = (six * s - six * s2) / h;
        let d11 = three * s2 - two * s;
        Ok(d00 * self.vs[i] + d10 * self.slopes[i] + d01 * self.vs[i + 1]
            + d11 * self.slopes[i + 1])
    }
}

/// Mass profile M(t) > 0 with analytic derivative for the presets.
#[derive(Debug, Clone, PartialEq)]
pub enum MassProfile<T: Real> {
    Constant(T),
    Exponential { m0: T, rate: T },
    Tabulated(Table<T>),
}

impl<T: Real> MassProfile<T> {
    pub fn mass(&self, t: T) -> Result<T> {
        let m = match self {
            MassProfile::Constant(m0) => *m0,
            MassProfile::Exponential { m0, rate } => *m0 * (*rate * t).exp(),
            MassProfile::Tabulated(tab) => tab.eval(t)?,
        };
        if !(m > T::zero()) {
            return Err(Error::Domain {
                context: "mass profile",
                message: format!("M({t}) = {m} is not positive"),
            });
        }
        Ok(m)
    }

    pub fn mass_dot(&self, t: T) -> Result<T> {
        match self {
            MassProfile::Constant(_) => Ok(T::zero()),
            MassProfile::Exponential { m0, rate } => Ok(*m0 * *rate * (*rate * t).exp()),
            MassProfile::Tabulated(tab) => tab.eval_derivative(t),
        }
    }
}

/// Frequency profile. The auxiliary equation only needs omega^2, so signed
/// omega^2 presets are accepted as well (inverted regimes).
#[derive(Debug, Clone, PartialEq)]
pub enum FrequencyProfile<T: Real> {
    Constant(T),
    LinearRamp { w0: T, rate: T },
    Sinusoidal { base: T, amplitude: T, angular_freq: T },
    Tabulated(Table<T>),
    OmegaSquared(T),
    OmegaSquaredTabulated(Table<T>),
}

impl<T: Real> FrequencyProfile<T> {
    pub fn omega_sq(&self, t: T) -> Result<T> {
        Ok(match self {
            FrequencyProfile::Constant(w0) => *w0 * *w0,
            FrequencyProfile::LinearRamp { w0, rate } => {
                let w = *w0 + *rate * t;
                w * w
            }
            FrequencyProfile::Sinusoidal {
                base,
                amplitude,
                angular_freq,
            } => {
                let w = *base + *amplitude * (*angular_freq * t).sin();
                w * w
            }
            FrequencyProfile::Tabulated(tab) => {
                let w = tab.eval(t)?;
                w * w
            }
            FrequencyProfile::OmegaSquared(ws) => *ws,
            FrequencyProfile::OmegaSquaredTabulated(tab) => tab.eval(t)?,
        })
    }
}

/// The (M(t), omega(t)) pair driving the trap.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeProfile<T: Real> {
    pub mass: MassProfile<T>,
    pub frequency: FrequencyProfile<T>,
}

impl<T: Real> TimeProfile<T> {
    pub fn new(mass: MassProfile<T>, frequency: FrequencyProfile<T>) -> Self {
        Self { mass, frequency }
    }

    pub fn static_unit() -> Self {
        Self {
            mass: MassProfile::Constant(T::one()),
            frequency: FrequencyProfile::Constant(T::one()),
        }
    }

    /// Fixed point of the auxiliary equation at t = 0: rho = 1/sqrt(M(0) w(0)).
    /// Requires omega^2(0) > 0.
    pub fn adiabatic_rho0(&self) -> Result<T> {
        let m0 = self.mass.mass(T::zero())?;
        let w2 = self.frequency.omega_sq(T::zero())?;
        if !(w2 > T::zero()) {
            return Err(Error::Domain {
                context: "adiabatic initial condition",
                message: format!("omega^2(0) = {w2} must be positive"),
            });
        }
        Ok(T::one() / (m0 * w2.sqrt()).sqrt())
    }
}

/// Sampled auxiliary trajectory plus the accumulated phase integral
/// int_0^t dt' / (M rho^2). Per-state phases attach the -(2n + 1 + sigma)
/// factor afterwards.
#[derive(Debug, Clone)]
pub struct EpSolution<T: Real> {
    pub times: Vec<T>,
    pub rho: Vec<T>,
    pub rho_dot: Vec<T>,
    pub phase_integral: Vec<T>,
    /// Max per-step discrepancy between one full step and two half steps,
    /// divided by 15 (step-doubling local error estimate).
    pub step_error_estimate: T,
}

impl<T: Real> EpSolution<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Accumulated phase eta_n(t_k) = -(2n + 1 + sigma) int_0^t dt'/(M rho^2).
    pub fn eta(&self, n: u32, sigma: T) -> Vec<T> {
        let factor = -(cast::<T>(2.0 * f64::from(n) + 1.0) + sigma);
        self.phase_integral.iter().map(|&v| factor * v).collect()
    }
}

const RHO_OVERFLOW_GUARD: f64 = 1e6;

fn ep_rhs<T: Real>(profile: &TimeProfile<T>, t: T, rho: T, v: T) -> Result<(T, T)> {
    let m = profile.mass.mass(t)?;
    let mdot = profile.mass.mass_dot(t)?;
    let w2 = profile.frequency.omega_sq(t)?;
    let acc = -(mdot / m) * v - w2 * rho + T::one() / (m * m * rho * rho * rho);
    Ok((v, acc))
}

fn rk4_step<T: Real>(
    profile: &TimeProfile<T>,
    t: T,
    rho: T,
    v: T,
    h: T,
) -> Result<(T, T)> {
    let half = cast::<T>(0.5);
    let sixth = T::one() / cast::<T>(6.0);
    let (k1r, k1v) = ep_rhs(profile, t, rho, v)?;
    let (k2r, k2v) = ep_rhs(profile, t + h * half, rho + k1r * h * half, v + k1v * h * half)?;
    let (k3r, k3v) = ep_rhs(profile, t + h * half, rho + k2r * h * half, v + k2v * h * half)?;
    let (k4r, k4v) = ep_rhs(profile, t + h, rho + k3r * h, v + k3v * h)?;
    let two = cast::<T>(2.0);
    Ok((
        rho + h * sixth * (k1r + two * k2r + two * k3r + k4r),
        v + h * sixth * (k1v + two * k2v + two * k3v + k4v),
    ))
}

/// Integrates the auxiliary equation from t = 0 to `t_end` (either sign) at
/// fixed step size `step`.
pub fn ep_solve<T: Real>(
    profile: &TimeProfile<T>,
    rho0: T,
    rho_dot0: T,
    t_end: T,
    step: T,
) -> Result<EpSolution<T>> {
    ep_solve_from(profile, T::zero(), rho0, rho_dot0, t_end, step)
}

/// Same as [`ep_solve`] with an arbitrary start time.
pub fn ep_solve_from<T: Real>(
    profile: &TimeProfile<T>,
    t0: T,
    rho0: T,
    rho_dot0: T,
    t1: T,
    step: T,
) -> Result<EpSolution<T>> {
    if !(rho0 > T::zero()) {
        return Err(Error::Domain {
            context: "ep_solve",
            message: format!("rho0 = {rho0} must be positive"),
        });
    }
    if !(step > T::zero()) {
        return Err(Error::Domain {
            context: "ep_solve",
            message: format!("step = {step} must be positive"),
        });
    }
    let span = t1 - t0;
    let n_steps = (span / step)
        .abs()
        .ceil()
        .to_usize()
        .unwrap_or(0)
        .max(1);
    let h = span / cast::<T>(n_steps as f64);

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut rho = Vec::with_capacity(n_steps + 1);
    let mut rho_dot = Vec::with_capacity(n_steps + 1);
    times.push(t0);
    rho.push(rho0);
    rho_dot.push(rho_dot0);
    let mut est = T::zero();
    let half = cast::<T>(0.5);
    let guard = cast::<T>(RHO_OVERFLOW_GUARD);
    let fifteenth = T::one() / cast::<T>(15.0);

    let (mut r, mut v) = (rho0, rho_dot0);
    for k in 0..n_steps {
        let t = t0 + h * cast::<T>(k as f64);
        let (r_full, v_full) = rk4_step(profile, t, r, v, h)?;
        let (rh, vh) = rk4_step(profile, t, r, v, h * half)?;
        let (r_half, _v_half) = rk4_step(profile, t + h * half, rh, vh, h * half)?;
        est = est.max((r_full - r_half).abs() * fifteenth);
        r = r_full;
        v = v_full;
        let t_next = t0 + h * cast::<T>((k + 1) as f64);
        if !(r > T::zero()) || r > guard || !r.is_finite() {
            return Err(Error::BlowUp {
                t: t_next.to_f64().unwrap_or(f64::NAN),
                rho: r.to_f64().unwrap_or(f64::NAN),
            });
        }
        times.push(t_next);
        rho.push(r);
        rho_dot.push(v);
    }

    let integrand: Result<Vec<T>> = times
        .iter()
        .zip(&rho)
        .map(|(&t, &rr)| Ok(T::one() / (profile.mass.mass(t)? * rr * rr)))
        .collect();
    let phase_integral = cumulative_integral(h, &integrand?);

    Ok(EpSolution {
        times,
        rho,
        rho_dot,
        phase_integral,
        step_error_estimate: est,
    })
}

/// 4th-order cumulative integral of uniformly spaced samples: paired Simpson
/// steps, with a one-interval cubic formula for the odd offsets.
pub fn cumulative_integral<T: Real>(h: T, f: &[T]) -> Vec<T> {
    let n = f.len();
    let mut out = vec![T::zero(); n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        // trapezoid fallback for very short runs
        for k in 1..n {
            out[k] = out[k - 1] + (f[k - 1] + f[k]) * h / cast::<T>(2.0);
        }
        return out;
    }
    let c24 = h / cast::<T>(24.0);
    out[1] = (cast::<T>(9.0) * f[0] + cast::<T>(19.0) * f[1] - cast::<T>(5.0) * f[2] + f[3]) * c24;
    let third = h / cast::<T>(3.0);
    let four = cast::<T>(4.0);
    for k in 2..n {
        out[k] = out[k - 2] + (f[k - 2] + four * f[k - 1] + f[k]) * third;
    }
    out
}

/// Max residual of the auxiliary equation along a solution, with the second
/// derivative reconstructed from the stored samples.
pub fn ep_residual<T: Real>(sol: &EpSolution<T>, profile: &TimeProfile<T>) -> Result<T> {
    let n = sol.len();
    if n < 6 {
        return Err(Error::Domain {
            context: "ep_residual",
            message: "too few samples".into(),
        });
    }
    let op = crate::fd::DiffOp::new(&sol.times, crate::fd::Topology::Bounded);
    let rho_ddot = op.d1(&sol.rho_dot);
    let mut worst = T::zero();
    for k in 0..n {
        let t = sol.times[k];
        let m = profile.mass.mass(t)?;
        let mdot = profile.mass.mass_dot(t)?;
        let w2 = profile.frequency.omega_sq(t)?;
        let r = sol.rho[k];
        let resid = rho_ddot[k] + (mdot / m) * sol.rho_dot[k] + w2 * r
            - T::one() / (m * m * r * r * r);
        worst = worst.max(resid.abs());
    }
    Ok(worst)
}

/// Phase samples eta_n(t) = -(2n + 1 + sigma) int_0^t dt'/(M rho^2).
pub fn phase_eta<T: Real>(sol: &EpSolution<T>, n: u32, sigma: T) -> Vec<T> {
    sol.eta(n, sigma)
}

/// Expectation <F| i hbar d/dt - (rho_dot / 2 rho)(r P + P r) |F> for real
/// radial factors F sampled at three consecutive times. Both terms are
/// purely imaginary for real F; the imaginary part is returned and must
/// vanish for the phase reduction to hold.
#[allow(clippy::too_many_arguments)]
pub fn phase_mean_check<T: Real>(
    grid: &Arc<Grid1D<T>>,
    f_prev: &[T],
    f_mid: &[T],
    f_next: &[T],
    eps: T,
    rho: T,
    rho_dot: T,
    params: &ModelParams<T>,
) -> T {
    let to_field = |vals: &[T]| {
        GridField::new(
            Arc::clone(grid),
            vals.iter().map(|&v| Complex::new(v, T::zero())).collect(),
        )
        .expect("grid length")
    };
    let mid = to_field(f_mid);
    let delta = compute_delta(params);
    let two_delta = delta + delta;
    let measure = |r: T| r.powf(two_delta);

    // i hbar <F | dF/dt>
    let dt_vals: Vec<Complex<T>> = f_next
        .iter()
        .zip(f_prev)
        .map(|(&a, &b)| Complex::new((a - b) / (eps + eps), T::zero()))
        .collect();
    let dt_field = GridField::new(Arc::clone(grid), dt_vals).expect("grid length");
    let braket_dt = mid
        .inner_with_measure(&dt_field, measure)
        .expect("same grid");

    // (rho_dot / 2 rho) <F | (r P + P r) F>
    let t3 = apply_t3(&mid, params);
    let braket_t3 = mid.inner_with_measure(&t3, measure).expect("same grid");

    let i_hbar = Complex::new(T::zero(), params.hbar);
    let coef = rho_dot / (rho + rho);
    (i_hbar * braket_dt - braket_t3 * coef).im
}
