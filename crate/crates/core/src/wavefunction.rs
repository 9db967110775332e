//! Radial eigenfunction, full time-dependent state assembly, normalization
//! and expectation values under the deformed measure.
//!
//! The scaled radial factor is
//!
//! ```text
//! R(x) = C_r x^(sigma + 1/2) exp(-x^2 / 2 hbar) L_n^sigma(x^2 / hbar),   x = r / rho
//! ```
//!
//! and the assembled state
//!
//! ```text
//! Psi = e^(i eta) e^(i M rho_dot r^2 / 2 hbar rho) rho^(-1/2) r^(-delta)
//!         R(r / rho) Theta(theta) Phi(phi),
//! ```
//!
//! whose modulus depends on time only through rho. The rho power follows
//! from keeping ||Psi|| = 1 at all times.
//!
//! The inner product weight is
//! r^(2 delta) |sin th|^(2 mu1 + 2 mu2 + 1) |cos th|^(2 mu3)
//! |sin ph|^(2 mu2) |cos ph|^(2 mu1) dr dth dph (spherical Jacobian included).

use std::io::{self, Read, Write};
use std::sync::Arc;

use num_complex::Complex;

use crate::angular::AngularMode;
use crate::ermakov::{EpSolution, TimeProfile};
use crate::error::{Error, Result};
use crate::grid::{Grid1D, GridField};
use crate::params::{compute_delta, ModelParams, SpectralConstants};
use crate::quadrature::gauss_legendre_on;
use crate::real::{cast, cast_usize, Real};
use crate::specfun::laguerre;

/// Truncation radius: the Gaussian tail beyond sqrt(hbar (4n + 2 sigma + 30))
/// is below 1e-12 of the norm.
pub fn kappa_max<T: Real>(n: u32, sigma: T, hbar: T) -> T {
    (hbar * (cast::<T>(4.0 * f64::from(n)) + sigma + sigma + cast::<T>(30.0))).sqrt()
}

/// Normalized radial factor in the scaled coordinate.
#[derive(Debug, Clone)]
pub struct RadialMode<T: Real> {
    pub n: u32,
    pub sigma: T,
    pub hbar: T,
    pub c_r: T,
}

impl<T: Real> RadialMode<T> {
    pub fn new(n: u32, sigma: T, hbar: T) -> Result<Self> {
        if sigma < T::zero() {
            return Err(Error::Domain {
                context: "radial mode",
                message: format!("sigma = {sigma} must be nonnegative"),
            });
        }
        let mut mode = Self {
            n,
            sigma,
            hbar,
            c_r: T::one(),
        };
        let xmax = kappa_max(n, sigma, hbar);
        let norm: T = converged(|order| {
            let (x, w) = gauss_legendre_on(order, T::zero(), xmax);
            x.iter()
                .zip(&w)
                .map(|(&xi, &wi)| {
                    let v = mode.eval_raw(xi);
                    wi * v * v
                })
                .sum()
        });
        mode.c_r = T::one() / norm.sqrt();
        Ok(mode)
    }

    fn eval_raw(&self, kappa: T) -> T {
        let half = cast::<T>(0.5);
        let z = kappa * kappa / self.hbar;
        kappa.powf(self.sigma + half)
            * (-z * half).exp()
            * laguerre(self.n, self.sigma, z).expect("sigma >= 0")
    }

    /// R(kappa) for kappa = r / rho > 0.
    pub fn eval(&self, kappa: T) -> T {
        self.c_r * self.eval_raw(kappa)
    }
}

fn converged<T: Real>(eval: impl Fn(usize) -> T) -> T {
    let mut order = 128;
    let mut prev = eval(order);
    for _ in 0..5 {
        order *= 2;
        let next = eval(order);
        if (next - prev).abs() <= cast::<T>(1e-10) * next.abs().max(T::one()) {
            return next;
        }
        prev = next;
    }
    prev
}

/// Max normalized residual of the scaled radial equation
/// R'' + [2E - x^2 - hbar^2 (delta(delta-1)+lambda)/x^2] R / hbar^2 = 0
/// over the interior of a uniform grid, using (delta, lambda, E) from the
/// spectral constants — an independent route to sigma.
pub fn radial_residual<T: Real>(
    mode: &RadialMode<T>,
    spectral: &SpectralConstants<T>,
    n_nodes: usize,
) -> Result<T> {
    let xmax = kappa_max(mode.n, mode.sigma, mode.hbar);
    let h = xmax / cast_usize::<T>(n_nodes);
    let nodes: Vec<T> = (0..n_nodes)
        .map(|k| (cast_usize::<T>(k) + cast::<T>(0.5)) * h)
        .collect();
    let f: Vec<T> = nodes.iter().map(|&x| mode.eval(x)).collect();
    let diff = crate::fd::DiffOp::new(&nodes, crate::fd::Topology::Bounded);
    let d2 = diff.d2(&f);
    let h2 = mode.hbar * mode.hbar;
    let delta = spectral.delta;
    let centrifugal = h2 * (delta * (delta - T::one()) + spectral.lambda);
    let two_e = spectral.energy + spectral.energy;
    let mut resid = Vec::with_capacity(n_nodes);
    let mut fmax = T::zero();
    for (k, &x) in nodes.iter().enumerate() {
        let v = d2[k] + (two_e - x * x - centrifugal / (x * x)) / h2 * f[k];
        resid.push(v);
        fmax = fmax.max(f[k].abs());
    }
    let lo = (n_nodes as f64 * crate::angular::RESIDUAL_MARGIN) as usize;
    let hi = n_nodes - lo;
    Ok(resid[lo..hi]
        .iter()
        .fold(T::zero(), |acc, &v| acc.max(v.abs()))
        / fmax)
}

/// Product quadrature grids for state assembly and the deformed inner
/// product. Angular nodes are Gauss rules on the fundamental domain mirrored
/// to the full domain, so reflections map nodes to nodes exactly and the
/// weights carry the full measure.
#[derive(Debug)]
pub struct StateGrids<T: Real> {
    params: ModelParams<T>,
    radial: Arc<Grid1D<T>>,
    /// Gauss weight times r^(2 delta) per radial node.
    weight_r: Vec<T>,
    theta: Vec<T>,
    weight_theta: Vec<T>,
    phi: Vec<T>,
    weight_phi: Vec<T>,
}

impl<T: Real> StateGrids<T> {
    /// `n_theta` must be even and `n_phi` divisible by four (mirrored
    /// quarter rules).
    pub fn new(
        params: &ModelParams<T>,
        r_max: T,
        n_r: usize,
        n_theta: usize,
        n_phi: usize,
    ) -> Result<Arc<Self>> {
        if n_theta % 2 != 0 || n_phi % 4 != 0 {
            return Err(Error::AsymmetricGrid(
                "angular quadrature needs even theta and phi divisible by 4",
            ));
        }
        let radial = Grid1D::radial_gauss(r_max, n_r);
        let delta = compute_delta(params);
        let two_delta = delta + delta;
        let weight_r: Vec<T> = radial
            .points()
            .iter()
            .zip(radial.quad_weights())
            .map(|(&r, &w)| w * r.powf(two_delta))
            .collect();

        let pi = T::PI();
        let (tq, twq) = gauss_legendre_on(n_theta / 2, T::zero(), T::FRAC_PI_2());
        let mut theta = tq.clone();
        let mut wtheta_raw = twq.clone();
        for i in (0..n_theta / 2).rev() {
            theta.push(pi - tq[i]);
            wtheta_raw.push(twq[i]);
        }
        let (pq, pwq) = gauss_legendre_on(n_phi / 4, T::zero(), T::FRAC_PI_2());
        let mut phi = pq.clone();
        let mut wphi_raw = pwq.clone();
        for i in (0..n_phi / 4).rev() {
            phi.push(pi - pq[i]);
            wphi_raw.push(pwq[i]);
        }
        for i in 0..n_phi / 4 {
            phi.push(pi + pq[i]);
            wphi_raw.push(pwq[i]);
        }
        for i in (0..n_phi / 4).rev() {
            phi.push(pi + pi - pq[i]);
            wphi_raw.push(pwq[i]);
        }

        let two = cast::<T>(2.0);
        let [mu1, mu2, mu3] = params.mu;
        let weight_theta = theta
            .iter()
            .zip(&wtheta_raw)
            .map(|(&t, &w)| {
                w * t.sin().abs().powf(two * (mu1 + mu2) + T::one())
                    * t.cos().abs().powf(two * mu3)
            })
            .collect();
        let weight_phi = phi
            .iter()
            .zip(&wphi_raw)
            .map(|(&p, &w)| {
                w * p.sin().abs().powf(two * mu2) * p.cos().abs().powf(two * mu1)
            })
            .collect();

        Ok(Arc::new(Self {
            params: *params,
            radial,
            weight_r,
            theta,
            weight_theta,
            phi,
            weight_phi,
        }))
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn radial(&self) -> &Arc<Grid1D<T>> {
        &self.radial
    }

    pub fn weight_r(&self) -> &[T] {
        &self.weight_r
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn weight_theta(&self) -> &[T] {
        &self.weight_theta
    }

    pub fn phi(&self) -> &[T] {
        &self.phi
    }

    pub fn weight_phi(&self) -> &[T] {
        &self.weight_phi
    }

    pub fn n_r(&self) -> usize {
        self.radial.len()
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }
}

/// Complex samples of the full state on a product grid at one instant.
#[derive(Debug, Clone)]
pub struct StateSnapshot<T: Real> {
    pub time: T,
    pub rho: T,
    pub rho_dot: T,
    pub mass: T,
    pub eta: T,
    grids: Arc<StateGrids<T>>,
    /// index (i_r * n_theta + j) * n_phi + k
    values: Vec<Complex<T>>,
}

impl<T: Real> StateSnapshot<T> {
    pub fn grids(&self) -> &Arc<StateGrids<T>> {
        &self.grids
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    #[inline]
    pub fn at(&self, i_r: usize, j_theta: usize, k_phi: usize) -> Complex<T> {
        self.values[(i_r * self.grids.n_theta() + j_theta) * self.grids.n_phi() + k_phi]
    }

    /// Builds a superposition sum_i c_i s_i on shared grids (same sector).
    pub fn superpose(states: &[(&StateSnapshot<T>, Complex<T>)]) -> Result<StateSnapshot<T>> {
        let (first, _) = states.first().ok_or(Error::ZeroState("superpose"))?;
        let mut values = vec![Complex::new(T::zero(), T::zero()); first.values.len()];
        for (s, c) in states {
            if !Arc::ptr_eq(&s.grids, &first.grids) {
                return Err(Error::GridMismatch("superposition across grids".into()));
            }
            for (v, &sv) in values.iter_mut().zip(&s.values) {
                *v = *v + sv * *c;
            }
        }
        Ok(StateSnapshot {
            time: first.time,
            rho: first.rho,
            rho_dot: first.rho_dot,
            mass: first.mass,
            eta: T::zero(),
            grids: Arc::clone(&first.grids),
            values,
        })
    }
}

/// Assembles the full state at sample index `t_index` of the auxiliary
/// solution.
pub fn assemble_psi<T: Real>(
    angular_mode: &AngularMode<T>,
    radial_mode: &RadialMode<T>,
    profile: &TimeProfile<T>,
    ep: &EpSolution<T>,
    t_index: usize,
    grids: &Arc<StateGrids<T>>,
) -> Result<StateSnapshot<T>> {
    if t_index >= ep.len() {
        return Err(Error::Domain {
            context: "assemble_psi",
            message: format!("t_index {t_index} beyond {} samples", ep.len()),
        });
    }
    let c = &angular_mode.constants;
    if (radial_mode.sigma - c.sigma).abs() > cast::<T>(1e-12) * (T::one() + c.sigma) {
        return Err(Error::InconsistentParity(
            "radial mode sigma does not match the angular mode".into(),
        ));
    }
    let params = &angular_mode.params;
    let time = ep.times[t_index];
    let rho = ep.rho[t_index];
    let rho_dot = ep.rho_dot[t_index];
    let mass = profile.mass.mass(time)?;
    let eta = -(cast::<T>(2.0 * f64::from(radial_mode.n) + 1.0) + radial_mode.sigma)
        * ep.phase_integral[t_index];

    let delta = compute_delta(params);
    let hbar = params.hbar;
    let gauss_coef = mass * rho_dot / ((hbar + hbar) * rho);
    let rho_norm = T::one() / rho.sqrt();

    let theta_vals: Result<Vec<T>> = grids
        .theta()
        .iter()
        .map(|&t| angular_mode.eval_theta_extended(t))
        .collect();
    let theta_vals = theta_vals?;
    let phi_vals: Result<Vec<T>> = grids
        .phi()
        .iter()
        .map(|&p| angular_mode.eval_phi_extended(p))
        .collect();
    let phi_vals = phi_vals?;

    let phase0 = Complex::from_polar(T::one(), eta);
    let mut values =
        Vec::with_capacity(grids.n_r() * grids.n_theta() * grids.n_phi());
    for &r in grids.radial().points() {
        let radial = rho_norm * r.powf(-delta) * radial_mode.eval(r / rho);
        let gauss_phase = Complex::from_polar(T::one(), gauss_coef * r * r);
        let rad = gauss_phase * phase0 * radial;
        for &tv in &theta_vals {
            let rt = rad * tv;
            for &pv in &phi_vals {
                values.push(rt * pv);
            }
        }
    }
    Ok(StateSnapshot {
        time,
        rho,
        rho_dot,
        mass,
        eta,
        grids: Arc::clone(grids),
        values,
    })
}

/// Deformed-measure overlap <a|b> by tensor-product quadrature.
pub fn norm_integral<T: Real>(
    a: &StateSnapshot<T>,
    b: &StateSnapshot<T>,
) -> Result<Complex<T>> {
    if !Arc::ptr_eq(a.grids(), b.grids()) {
        return Err(Error::GridMismatch("overlap across different grids".into()));
    }
    let g = a.grids();
    let (nt, np) = (g.n_theta(), g.n_phi());
    let mut acc = Complex::new(T::zero(), T::zero());
    for (i, &wr) in g.weight_r().iter().enumerate() {
        let mut acc_r = Complex::new(T::zero(), T::zero());
        for (j, &wt) in g.weight_theta().iter().enumerate() {
            let mut acc_t = Complex::new(T::zero(), T::zero());
            let base = (i * nt + j) * np;
            for (k, &wp) in g.weight_phi().iter().enumerate() {
                acc_t = acc_t + a.values[base + k].conj() * b.values[base + k] * wp;
            }
            acc_r = acc_r + acc_t * wt;
        }
        acc = acc + acc_r * wr;
    }
    Ok(acc)
}

/// Applies a radial-sector operator to every radial line of a snapshot.
pub fn map_radial_lines<T: Real>(
    state: &StateSnapshot<T>,
    op: impl Fn(&GridField<T>) -> GridField<T>,
) -> StateSnapshot<T> {
    let g = state.grids();
    let (nr, nt, np) = (g.n_r(), g.n_theta(), g.n_phi());
    let mut values = vec![Complex::new(T::zero(), T::zero()); nr * nt * np];
    let mut line = vec![Complex::new(T::zero(), T::zero()); nr];
    for j in 0..nt {
        for k in 0..np {
            for i in 0..nr {
                line[i] = state.at(i, j, k);
            }
            let field = GridField::new(Arc::clone(g.radial()), line.clone()).expect("line length");
            let out = op(&field);
            for (i, &v) in out.values().iter().enumerate() {
                values[(i * nt + j) * np + k] = v;
            }
        }
    }
    StateSnapshot {
        values,
        grids: Arc::clone(g),
        ..*state
    }
}

/// <state| I(t) |state> with the invariant taken at the snapshot's own
/// (rho, rho_dot, mass).
pub fn invariant_expectation<T: Real>(
    state: &StateSnapshot<T>,
    params: &ModelParams<T>,
    spectral: &SpectralConstants<T>,
) -> T {
    let applied = map_radial_lines(state, |f| {
        crate::operators::apply_invariant(
            f,
            params,
            spectral.lambda,
            state.rho,
            state.rho_dot,
            state.mass,
        )
    });
    norm_integral(state, &applied).expect("same grids").re
}

/// <state| H(t) |state> at the given mass and frequency.
pub fn hamiltonian_expectation<T: Real>(
    state: &StateSnapshot<T>,
    params: &ModelParams<T>,
    spectral: &SpectralConstants<T>,
    mass: T,
    omega: T,
) -> T {
    let applied = map_radial_lines(state, |f| {
        crate::operators::apply_hamiltonian(f, params, spectral.lambda, mass, omega)
    });
    norm_integral(state, &applied).expect("same grids").re
}

/// Reduced radial state u(r, t) = r^delta * (radial factor of Psi) on an
/// arbitrary radial grid; this is the function the reference propagator
/// evolves, normalized under the plain measure dr.
pub fn reduced_radial_state<T: Real>(
    radial_mode: &RadialMode<T>,
    hbar: T,
    profile: &TimeProfile<T>,
    ep: &EpSolution<T>,
    t_index: usize,
    grid: &Arc<Grid1D<T>>,
) -> Result<Vec<Complex<T>>> {
    if t_index >= ep.len() {
        return Err(Error::Domain {
            context: "reduced_radial_state",
            message: format!("t_index {t_index} beyond {} samples", ep.len()),
        });
    }
    let time = ep.times[t_index];
    let rho = ep.rho[t_index];
    let rho_dot = ep.rho_dot[t_index];
    let mass = profile.mass.mass(time)?;
    let eta = -(cast::<T>(2.0 * f64::from(radial_mode.n) + 1.0) + radial_mode.sigma)
        * ep.phase_integral[t_index];
    let gauss_coef = mass * rho_dot / ((hbar + hbar) * rho);
    let rho_norm = T::one() / rho.sqrt();
    let phase0 = Complex::from_polar(T::one(), eta);
    Ok(grid
        .points()
        .iter()
        .map(|&r| {
            Complex::from_polar(T::one(), gauss_coef * r * r)
                * phase0
                * (rho_norm * radial_mode.eval(r / rho))
        })
        .collect())
}

const SNAPSHOT_MAGIC: &[u8; 8] = b"DNKLSNP1";

/// Writes the compact binary dump: magic, grid sizes (u32), scalars and
/// arrays as little-endian f64.
pub fn write_snapshot_bin<T: Real>(state: &StateSnapshot<T>, w: &mut impl Write) -> io::Result<()> {
    let g = state.grids();
    w.write_all(SNAPSHOT_MAGIC)?;
    for n in [g.n_r() as u32, g.n_theta() as u32, g.n_phi() as u32] {
        w.write_all(&n.to_le_bytes())?;
    }
    let to_f64 = |v: T| v.to_f64().unwrap_or(f64::NAN);
    for v in [state.time, state.rho, state.rho_dot, state.mass, state.eta] {
        w.write_all(&to_f64(v).to_le_bytes())?;
    }
    for &r in g.radial().points() {
        w.write_all(&to_f64(r).to_le_bytes())?;
    }
    for &t in g.theta() {
        w.write_all(&to_f64(t).to_le_bytes())?;
    }
    for &p in g.phi() {
        w.write_all(&to_f64(p).to_le_bytes())?;
    }
    for v in &state.values {
        w.write_all(&to_f64(v.re).to_le_bytes())?;
        w.write_all(&to_f64(v.im).to_le_bytes())?;
    }
    Ok(())
}

/// Raw contents of a binary snapshot dump.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotDump {
    pub n_r: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    pub time: f64,
    pub rho: f64,
    pub rho_dot: f64,
    pub mass: f64,
    pub eta: f64,
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub values: Vec<Complex<f64>>,
}

pub fn read_snapshot_bin(r: &mut impl Read) -> io::Result<SnapshotDump> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "bad magic"));
    }
    let mut u32buf = [0u8; 4];
    let mut read_u32 = |r: &mut dyn Read| -> io::Result<usize> {
        r.read_exact(&mut u32buf)?;
        Ok(u32::from_le_bytes(u32buf) as usize)
    };
    let n_r = read_u32(r)?;
    let n_theta = read_u32(r)?;
    let n_phi = read_u32(r)?;
    let mut f64buf = [0u8; 8];
    let mut read_f64 = move |r: &mut dyn Read| -> io::Result<f64> {
        r.read_exact(&mut f64buf)?;
        Ok(f64::from_le_bytes(f64buf))
    };
    let time = read_f64(r)?;
    let rho = read_f64(r)?;
    let rho_dot = read_f64(r)?;
    let mass = read_f64(r)?;
    let eta = read_f64(r)?;
    let mut read_vec = |r: &mut dyn Read, n: usize| -> io::Result<Vec<f64>> {
        (0..n).map(|_| read_f64(r)).collect()
    };
    let rr = read_vec(r, n_r)?;
    let theta = read_vec(r, n_theta)?;
    let phi = read_vec(r, n_phi)?;
    let mut values = Vec::with_capacity(n_r * n_theta * n_phi);
    for _ in 0..n_r * n_theta * n_phi {
        let re = read_f64(r)?;
        let im = read_f64(r)?;
        values.push(Complex::new(re, im));
    }
    Ok(SnapshotDump {
        n_r,
        n_theta,
        n_phi,
        time,
        rho,
        rho_dot,
        mass,
        eta,
        r: rr,
        theta,
        phi,
        values,
    })
}

/// Writes the CSV form: one row per node, columns r, theta, phi, Re, Im.
pub fn write_snapshot_csv<T: Real>(state: &StateSnapshot<T>, w: &mut impl Write) -> io::Result<()> {
    let g = state.grids();
    writeln!(w, "r,theta,phi,re_psi,im_psi")?;
    let to_f64 = |v: T| v.to_f64().unwrap_or(f64::NAN);
    for (i, &r) in g.radial().points().iter().enumerate() {
        for (j, &t) in g.theta().iter().enumerate() {
            for (k, &p) in g.phi().iter().enumerate() {
                let v = state.at(i, j, k);
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    to_f64(r),
                    to_f64(t),
                    to_f64(p),
                    to_f64(v.re),
                    to_f64(v.im)
                )?;
            }
        }
    }
    Ok(())
}
