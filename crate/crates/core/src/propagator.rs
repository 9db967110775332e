//! Reference time evolution of the effective radial problem.
//!
//! The propagator works on the reduced function u = r^delta * (radial factor
//! of Psi), which obeys a plain 1D equation
//!
//! ```text
//! i hbar du/dt = [ -hbar^2/(2M) (d^2/dr^2 - (delta(delta-1) + lambda)/r^2)
//!                  + M omega^2 r^2 / 2 ] u
//! ```
//!
//! on a uniform half-offset grid with u(0) = 0 enforced through an
//! antisymmetric ghost node. Stepping is trapezoidal-implicit with the
//! Hamiltonian evaluated at the half step; each step is one complex
//! tridiagonal solve. The scheme is a Cayley transform of a real symmetric
//! matrix, so the discrete norm is preserved to roundoff.

use num_complex::Complex;

use crate::ermakov::TimeProfile;
use crate::error::{Error, Result};
use crate::real::{cast, cast_usize, Real};

#[derive(Debug, Clone)]
pub struct PropagatorConfig<T: Real> {
    pub r_max: T,
    pub nodes: usize,
    pub step: T,
    pub profile: TimeProfile<T>,
    pub delta: T,
    pub lambda: T,
    pub hbar: T,
}

impl<T: Real> PropagatorConfig<T> {
    pub fn grid_spacing(&self) -> T {
        self.r_max / cast_usize::<T>(self.nodes)
    }

    pub fn grid_points(&self) -> Vec<T> {
        let h = self.grid_spacing();
        (0..self.nodes)
            .map(|k| (cast_usize::<T>(k) + cast::<T>(0.5)) * h)
            .collect()
    }

    /// Parabolic-stability style sanity bound; the implicit scheme is
    /// unconditionally stable, so a violation is only reported, not fatal.
    pub fn cfl_diagnostic(&self, t: T) -> Result<bool> {
        let h = self.grid_spacing();
        let m = self.profile.mass.mass(t)?;
        let safety = cast::<T>(10.0);
        Ok(self.step < h * h * m / self.hbar * safety)
    }
}

/// Real symmetric tridiagonal operator.
#[derive(Debug, Clone)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    pub fn apply(&self, u: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.diag.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = u[i] * self.diag[i];
            if i > 0 {
                acc = acc + u[i - 1] * self.off[i - 1];
            }
            if i + 1 < n {
                acc = acc + u[i + 1] * self.off[i];
            }
            out.push(acc);
        }
        out
    }

    pub fn expectation(&self, u: &[Complex<T>], h: T) -> T {
        let hu = self.apply(u);
        let num: Complex<T> = u
            .iter()
            .zip(&hu)
            .map(|(&a, &b)| a.conj() * b)
            .fold(Complex::new(T::zero(), T::zero()), |s, v| s + v);
        let den: T = u.iter().map(|v| v.norm_sqr()).sum();
        let _ = h;
        num.re / den
    }
}

/// Discretization of the effective radial Hamiltonian at time t.
pub fn effective_radial_hamiltonian<T: Real>(
    config: &PropagatorConfig<T>,
    t: T,
) -> Result<Tridiagonal<T>> {
    let n = config.nodes;
    let h = config.grid_spacing();
    let m = config.profile.mass.mass(t)?;
    let w2 = config.profile.frequency.omega_sq(t)?;
    let hbar = config.hbar;
    let kin = hbar * hbar / (cast::<T>(2.0) * m * h * h);
    let cent = hbar * hbar * (config.delta * (config.delta - T::one()) + config.lambda)
        / (cast::<T>(2.0) * m);
    let half = cast::<T>(0.5);
    let mut diag = Vec::with_capacity(n);
    for (k, r) in config.grid_points().into_iter().enumerate() {
        // antisymmetric ghost beyond each wall: diagonal picks up 3 instead of 2
        let wall = if k == 0 || k == n - 1 {
            cast::<T>(3.0)
        } else {
            cast::<T>(2.0)
        };
        diag.push(kin * wall + cent / (r * r) + half * m * w2 * r * r);
    }
    let off = vec![-kin; n - 1];
    Ok(Tridiagonal { diag, off })
}

/// Thomas solve of a complex tridiagonal system (sub/super diagonals equal).
pub fn thomas_solve<T: Real>(
    diag: &[Complex<T>],
    off: &[Complex<T>],
    rhs: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    let n = diag.len();
    let mut c = vec![Complex::new(T::zero(), T::zero()); n];
    let mut d = vec![Complex::new(T::zero(), T::zero()); n];
    let tiny = T::min_positive_value() * cast::<T>(1e4);
    let mut denom = diag[0];
    if denom.norm_sqr() <= tiny {
        return Err(Error::SingularSolve { row: 0 });
    }
    c[0] = off[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - off[i - 1] * c[i - 1];
        if denom.norm_sqr() <= tiny {
            return Err(Error::SingularSolve { row: i });
        }
        if i < n - 1 {
            c[i] = off[i] / denom;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / denom;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let xi = x[i] - c[i] * x[i + 1];
        x[i] = xi;
    }
    Ok(x)
}

/// Discrete l2 norm under the plain measure h dr.
pub fn norm_u<T: Real>(u: &[Complex<T>], h: T) -> T {
    (u.iter().map(|v| v.norm_sqr()).sum::<T>() * h).sqrt()
}

/// Normalized overlap modulus between two states on the same grid.
pub fn fidelity<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch("fidelity of different lengths".into()));
    }
    let na: T = a.iter().map(|v| v.norm_sqr()).sum();
    let nb: T = b.iter().map(|v| v.norm_sqr()).sum();
    if na <= T::zero() || nb <= T::zero() {
        return Err(Error::ZeroState("fidelity"));
    }
    let dot = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| x.conj() * y)
        .fold(Complex::new(T::zero(), T::zero()), |s, v| s + v);
    Ok(dot.norm() / (na * nb).sqrt())
}

/// Overlap argument arg<a|b> (for phase tracking).
pub fn overlap_phase<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x.conj() * y)
        .fold(Complex::new(T::zero(), T::zero()), |s, v| s + v)
        .arg()
}

/// Trapezoidal-implicit propagation from t = 0 to t_end; the observer sees
/// every accepted step (step index, time, state).
pub fn propagate_observed<T: Real>(
    config: &PropagatorConfig<T>,
    u0: &[Complex<T>],
    t_end: T,
    mut observer: impl FnMut(usize, T, &[Complex<T>]),
) -> Result<Vec<Complex<T>>> {
    let n = config.nodes;
    if u0.len() != n {
        return Err(Error::GridMismatch(format!(
            "initial state has {} samples on a {}-node grid",
            u0.len(),
            n
        )));
    }
    let n_steps = (t_end / config.step)
        .to_f64()
        .map(|v| v.round() as usize)
        .unwrap_or(0)
        .max(1);
    let dt = t_end / cast_usize::<T>(n_steps);
    let half = cast::<T>(0.5);
    let theta = dt * half / config.hbar;
    let mut u = u0.to_vec();
    observer(0, T::zero(), &u);
    for step in 0..n_steps {
        let t_half = (cast_usize::<T>(step) + half) * dt;
        let ham = effective_radial_hamiltonian(config, t_half)?;
        // A u' = B u with A = 1 + i theta H, B = 1 - i theta H
        let i_theta = Complex::new(T::zero(), theta);
        let a_diag: Vec<Complex<T>> = ham
            .diag
            .iter()
            .map(|&d| Complex::new(T::one(), T::zero()) + i_theta * d)
            .collect();
        let a_off: Vec<Complex<T>> = ham.off.iter().map(|&o| i_theta * o).collect();
        let hu = ham.apply(&u);
        let rhs: Vec<Complex<T>> = u
            .iter()
            .zip(&hu)
            .map(|(&ui, &hui)| ui - Complex::new(T::zero(), theta) * hui)
            .collect();
        u = thomas_solve(&a_diag, &a_off, &rhs)?;
        observer(step + 1, cast_usize::<T>(step + 1) * dt, &u);
    }
    Ok(u)
}

/// Convenience wrapper collecting every `record_every`-th step (and the
/// final one).
pub fn propagate<T: Real>(
    config: &PropagatorConfig<T>,
    u0: &[Complex<T>],
    t_end: T,
    record_every: usize,
) -> Result<Vec<(T, Vec<Complex<T>>)>> {
    let stride = record_every.max(1);
    let n_steps = (t_end / config.step)
        .to_f64()
        .map(|v| v.round() as usize)
        .unwrap_or(0)
        .max(1);
    let mut frames = Vec::new();
    propagate_observed(config, u0, t_end, |step, t, u| {
        if step % stride == 0 || step == n_steps {
            frames.push((t, u.to_vec()));
        }
    })?;
    Ok(frames)
}

/// Smallest eigenvalue of a positive-definite tridiagonal by inverse power
/// iteration with the Thomas solver.
pub fn lowest_eigenvalue<T: Real>(ham: &Tridiagonal<T>, iters: usize) -> Result<T> {
    let n = ham.diag.len();
    let diag_c: Vec<Complex<T>> = ham.diag.iter().map(|&d| Complex::new(d, T::zero())).collect();
    let off_c: Vec<Complex<T>> = ham.off.iter().map(|&o| Complex::new(o, T::zero())).collect();
    let mut v: Vec<Complex<T>> = (0..n)
        .map(|i| Complex::new(T::one() / cast_usize::<T>(i + 1), T::zero()))
        .collect();
    let mut eig = T::zero();
    for _ in 0..iters {
        let w = thomas_solve(&diag_c, &off_c, &v)?;
        let norm = w.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
        v = w.into_iter().map(|x| x / norm).collect();
        eig = ham.expectation(&v, T::one());
    }
    Ok(eig)
}

/// Expectation of the invariant in the reduced representation:
/// I_u = [ (1/rho^2 + M^2 rho_dot^2) r^2 - hbar^2 rho^2 (d^2 - c/r^2)
///         - M rho rho_dot (hbar/i)(2 r d + 1) ] / 2.
#[allow(clippy::too_many_arguments)]
pub fn invariant_expectation_u<T: Real>(
    u: &[Complex<T>],
    points: &[T],
    h: T,
    delta: T,
    lambda: T,
    hbar: T,
    rho: T,
    rho_dot: T,
    mass: T,
) -> T {
    let n = u.len();
    let half = cast::<T>(0.5);
    let two = cast::<T>(2.0);
    let c_r2 = (T::one() / (rho * rho) + mass * mass * rho_dot * rho_dot) * half;
    let c_kin = hbar * hbar * rho * rho * half;
    let cent = delta * (delta - T::one()) + lambda;
    let c_mix = mass * rho * rho_dot * half;

    // second derivative with antisymmetric ghosts, first derivative central
    let mut iu = vec![Complex::new(T::zero(), T::zero()); n];
    for i in 0..n {
        let um = if i == 0 { -u[0] } else { u[i - 1] };
        let up = if i == n - 1 { -u[n - 1] } else { u[i + 1] };
        let d2 = (um - u[i] * two + up) / (h * h);
        let d1 = (up - um) / (two * h);
        let r = points[i];
        let t3 = (d1 * (two * r) + u[i]) * Complex::new(T::zero(), -hbar);
        iu[i] = u[i] * (c_r2 * r * r) - (d2 - u[i] * (cent / (r * r))) * c_kin - t3 * c_mix;
    }
    let num: T = u
        .iter()
        .zip(&iu)
        .map(|(&a, &b)| (a.conj() * b).re)
        .sum();
    let den: T = u.iter().map(|v| v.norm_sqr()).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ermakov::{FrequencyProfile, MassProfile};
    use approx::assert_relative_eq;

    fn static_config(nodes: usize, step: f64, delta: f64, lambda: f64) -> PropagatorConfig<f64> {
        PropagatorConfig {
            r_max: 10.0,
            nodes,
            step,
            profile: TimeProfile::static_unit(),
            delta,
            lambda,
            hbar: 1.0,
        }
    }

    #[test]
    fn thomas_solves_reference_system() {
        let diag: Vec<Complex<f64>> = vec![Complex::new(2.0, 0.0); 5];
        let off: Vec<Complex<f64>> = vec![Complex::new(-1.0, 0.0); 4];
        let x_true: Vec<Complex<f64>> =
            (0..5).map(|i| Complex::new(i as f64 + 1.0, -0.5 * i as f64)).collect();
        let tri = Tridiagonal {
            diag: vec![2.0; 5],
            off: vec![-1.0; 4],
        };
        let rhs = tri.apply(&x_true);
        let x = thomas_solve(&diag, &off, &rhs).unwrap();
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn ground_state_eigenvalues_match_oscillator() {
        // delta = 1, lambda = 0 -> E0 = 1.5; lambda = 2 -> E0 = 2.5
        let config = static_config(4000, 1e-3, 1.0, 0.0);
        let ham = effective_radial_hamiltonian(&config, 0.0).unwrap();
        let e0 = lowest_eigenvalue(&ham, 60).unwrap();
        assert!((e0 - 1.5).abs() < 1e-4, "E0 = {e0}");

        let config = static_config(4000, 1e-3, 1.0, 2.0);
        let ham = effective_radial_hamiltonian(&config, 0.0).unwrap();
        let e0 = lowest_eigenvalue(&ham, 60).unwrap();
        assert!((e0 - 2.5).abs() < 1e-4, "E0 = {e0}");
    }

    #[test]
    fn deformed_ground_state_eigenvalue() {
        // lowest invariant eigenvalue hbar (sigma + 1) at the static profile
        let params = crate::params::ModelParams::new([0.3, 0.4, 0.2], 0.1, 0.5, 1.0).unwrap();
        let sector = crate::params::ParitySector::from_signs(1, 1, 1).unwrap();
        let nq = crate::params::QuantumNumbers::new(0, 0, 0);
        let c = crate::params::SpectralConstants::compute(&params, &sector, &nq).unwrap();
        let config = static_config(6000, 1e-3, c.delta, c.lambda);
        let ham = effective_radial_hamiltonian(&config, 0.0).unwrap();
        let e0 = lowest_eigenvalue(&ham, 80).unwrap();
        assert!((e0 - (c.sigma + 1.0)).abs() < 1e-3, "E0 = {e0} vs {}", c.sigma + 1.0);
    }

    #[test]
    fn stationary_state_keeps_fidelity_and_norm() {
        let config = static_config(2000, 1e-3, 1.0, 0.0);
        let pts = config.grid_points();
        let h = config.grid_spacing();
        // sigma = 1/2 ground state: u ~ r exp(-r^2/2)
        let mut u0: Vec<Complex<f64>> = pts
            .iter()
            .map(|&r| Complex::new(r * (-r * r / 2.0).exp(), 0.0))
            .collect();
        let n0 = norm_u(&u0, h);
        u0.iter_mut().for_each(|v| *v /= n0);
        let u = propagate_observed(&config, &u0, 10.0, |_, _, _| {}).unwrap();
        let f = fidelity(&u, &u0).unwrap();
        assert!(f > 1.0 - 1e-8, "fidelity {f}");
        assert!((norm_u(&u, h) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn norm_is_preserved_over_many_steps() {
        let config = static_config(1000, 1e-3, 1.0, 2.0);
        let pts = config.grid_points();
        let h = config.grid_spacing();
        let mut u0: Vec<Complex<f64>> = pts
            .iter()
            .map(|&r| Complex::new(r * r * (-r * r / 2.0).exp() * (1.3 * r).cos(), 0.1 * r.sin()))
            .collect();
        let n0 = norm_u(&u0, h);
        u0.iter_mut().for_each(|v| *v /= n0);
        let mut max_drift = 0.0f64;
        propagate_observed(&config, &u0, 10.0, |_, _, u| {
            max_drift = max_drift.max((norm_u(u, h) - 1.0).abs());
        })
        .unwrap();
        assert!(max_drift < 1e-9, "drift {max_drift}");
    }

    #[test]
    fn static_phase_tracks_energy() {
        // arg <u(0)|u(t)> = -E t within 1e-6 at t = 3 for the sigma = 1/2 state
        let config = PropagatorConfig {
            r_max: 10.0,
            nodes: 16000,
            step: 1e-4,
            profile: TimeProfile::static_unit(),
            delta: 1.0,
            lambda: 0.0,
            hbar: 1.0,
        };
        let pts = config.grid_points();
        let h = config.grid_spacing();
        let mut u0: Vec<Complex<f64>> = pts
            .iter()
            .map(|&r| Complex::new(r * (-r * r / 2.0).exp(), 0.0))
            .collect();
        let n0 = norm_u(&u0, h);
        u0.iter_mut().for_each(|v| *v /= n0);
        let u = propagate_observed(&config, &u0, 3.0, |_, _, _| {}).unwrap();
        let phase = overlap_phase(&u0, &u);
        let want = (-1.5f64 * 3.0).rem_euclid(2.0 * std::f64::consts::PI);
        let got = phase.rem_euclid(2.0 * std::f64::consts::PI);
        let diff = (got - want).abs().min(2.0 * std::f64::consts::PI - (got - want).abs());
        assert!(diff < 1e-6, "phase error {diff}");
    }

    #[test]
    fn scheme_is_second_order_in_step_and_spacing() {
        // refine (dt, h) together; error should fall ~4x per halving
        let err_at = |nodes: usize, step: f64| -> f64 {
            let config = PropagatorConfig {
                r_max: 10.0,
                nodes,
                step,
                profile: TimeProfile::new(
                    MassProfile::Constant(1.0),
                    FrequencyProfile::Sinusoidal {
                        base: 1.0,
                        amplitude: 0.2,
                        angular_freq: 2.0,
                    },
                ),
                delta: 1.0,
                lambda: 0.0,
                hbar: 1.0,
            };
            let profile = config.profile.clone();
            let mode = crate::wavefunction::RadialMode::new(0, 0.5, 1.0).unwrap();
            let ep = crate::ermakov::ep_solve(&profile, 1.0, 0.0, 1.0, step).unwrap();
            let grid = crate::grid::Grid1D::radial_uniform(10.0, nodes);
            let u0 =
                crate::wavefunction::reduced_radial_state(&mode, 1.0, &profile, &ep, 0, &grid)
                    .unwrap();
            let u = propagate_observed(&config, &u0, 1.0, |_, _, _| {}).unwrap();
            let u_ref = crate::wavefunction::reduced_radial_state(
                &mode,
                1.0,
                &profile,
                &ep,
                ep.len() - 1,
                &grid,
            )
            .unwrap();
            1.0 - fidelity(&u, &u_ref).unwrap()
        };
        let e0 = err_at(250, 4e-3);
        let e1 = err_at(500, 2e-3);
        let e2 = err_at(1000, 1e-3);
        assert!(e0 / e1 > 2.5 && e0 / e1 < 7.0, "ratio {}", e0 / e1);
        assert!(e1 / e2 > 2.5 && e1 / e2 < 7.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn singular_solve_is_reported() {
        let diag = vec![Complex::new(0.0, 0.0); 3];
        let off = vec![Complex::new(1.0, 0.0); 2];
        let rhs = vec![Complex::new(1.0, 0.0); 3];
        assert!(matches!(
            thomas_solve(&diag, &off, &rhs),
            Err(Error::SingularSolve { row: 0 })
        ));
    }

    #[test]
    fn fidelity_edge_cases() {
        let a = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)];
        assert_relative_eq!(fidelity(&a, &a).unwrap(), 1.0);
        let b = vec![Complex::new(0.0, 1.0), Complex::new(1.0, 0.0)];
        // orthogonal pair
        let c: Vec<Complex<f64>> = vec![Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)];
        let d: Vec<Complex<f64>> = vec![Complex::new(1.0, 0.0), Complex::new(-1.0, 0.0)];
        assert!(fidelity(&c, &d).unwrap() < 1e-14);
        let zero = vec![Complex::new(0.0, 0.0); 2];
        assert!(matches!(fidelity(&a, &zero), Err(Error::ZeroState(_))));
        let _ = b;
    }

    #[test]
    fn cfl_diagnostic_reports() {
        let config = static_config(100, 1e-3, 1.0, 0.0);
        assert!(config.cfl_diagnostic(0.0).unwrap());
        let config = static_config(100_000, 1.0, 1.0, 0.0);
        assert!(!config.cfl_diagnostic(0.0).unwrap());
    }
}
