//! Ground-state preparation and real-time propagation for the quintic
//! mean-field equation and the N-orbital Tonks-Girardeau representation.
//!
//! Both models are propagated by second-order Strang splitting with the
//! potential sampled at substep midpoints; the schedule enters only through
//! omega^2(t). The mean-field ground state comes from imaginary-time
//! evolution with renormalization, the orbitals from dense diagonalization
//! of the discretized Hamiltonian.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Float;

use crate::eigen::lowest_eigenpairs;
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::SpatialGrid;
use crate::ramp::RampSchedule;
use crate::scalar::Real;
use crate::spectral::Spectral;

/// Steps between monitor checks during real-time evolution.
const MONITOR_EVERY: usize = 500;
/// Imaginary-time stages seeding the ground-state solve; the final accuracy
/// comes from the residual polish, so these only need to land nearby.
const IMAG_TIME_STAGES: [f64; 2] = [2e-2, 2e-3];
const IMAG_TIME_MAX_STEPS: usize = 400_000;
/// Convergence threshold on the normalized field-change rate
/// ||psi_new - psi_old|| / (sqrt(N) dtau) per step. The rate is linear in
/// the residual excited-state amplitude, unlike the energy, which is
/// quadratic in it and bottoms out at the double-precision floor first.
const IMAG_TIME_RATE_TOL: f64 = 1e-4;
/// Residual polish: stop when ||(H - mu) psi|| < tol * |mu| sqrt(N).
const POLISH_REL_TOL: f64 = 1e-11;
const POLISH_MAX_ITERS: usize = 20_000;
/// Nodes with V - mu beyond this multiple of max(mu, 1) are frozen during
/// the polish; the state is exponentially negligible there and including
/// them would force a uselessly small damping factor in steep traps.
const POLISH_MASK_RATIO: f64 = 20.0;

/// V_i = 1/2 omega^2 (x_i^2 + gamma x_i^4).
pub fn trap_potential<T: Real>(grid: &SpatialGrid<T>, omega_sq: T, gamma: T) -> Vec<T> {
    grid.xs()
        .iter()
        .map(|&x| T::of(0.5) * omega_sq * (x * x + gamma * x.powi(4)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct MeanFieldState<T: Real> {
    pub field: ComplexField<T>,
    pub n_particles: T,
    pub time: T,
}

#[derive(Debug, Clone)]
pub struct OrbitalSet<T: Real> {
    pub orbitals: Vec<ComplexField<T>>,
    /// Single-particle energies at construction; not updated by evolution.
    pub energies: Vec<T>,
    pub time: T,
}

impl<T: Real> OrbitalSet<T> {
    pub fn len(&self) -> usize {
        self.orbitals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbitals.is_empty()
    }

    /// max |G_lm - delta_lm| over the Gram matrix of the set.
    pub fn max_gram_deviation(&self) -> T {
        let mut dev = T::zero();
        for (l, a) in self.orbitals.iter().enumerate() {
            for (m, b) in self.orbitals.iter().enumerate() {
                let g = a.inner_product(b).expect("same grid");
                let target = if l == m { T::one() } else { T::zero() };
                dev = dev.max((g - Complex::new(target, T::zero())).norm());
            }
        }
        dev
    }
}

/// Time-step policy: keeps both the kinetic phase per step and the largest
/// transient potential phase well below pi.
pub fn recommended_dt<T: Real>(grid: &SpatialGrid<T>, schedule: &RampSchedule<T>) -> T {
    let dx = grid.dx();
    let t_f = schedule.t_f();
    let mut dt = (T::of(0.1) * dx * dx / T::PI())
        .min(T::of(1e-3))
        .min(t_f / T::of(2000.0));
    let omega_max = schedule.max_abs_omega_sq(2000);
    let edge_sq = grid.x_edge() * grid.x_edge();
    if omega_max * edge_sq > T::zero() {
        dt = dt.min(T::of(0.5) / (omega_max * edge_sq));
    }
    dt
}

/// Shared split-step machinery on one grid.
struct Stepper<T: Real> {
    spectral: Spectral<T>,
    /// x^2 + gamma x^4 per node; multiplied by omega^2/2 each step.
    pot_shape: Vec<T>,
    kinetic_phase: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
    dt: T,
}

impl<T: Real> Stepper<T> {
    fn new(grid: Arc<SpatialGrid<T>>, gamma: T, dt: T) -> Self {
        let pot_shape = grid
            .xs()
            .iter()
            .map(|&x| x * x + gamma * x.powi(4))
            .collect();
        let kinetic_phase = grid
            .ks()
            .iter()
            .map(|&k| Complex::from_polar(T::one(), -k * k / T::of(2.0) * dt))
            .collect();
        let spectral = Spectral::new(grid);
        let scratch = vec![Complex::new(T::zero(), T::zero()); spectral.scratch_len()];
        Self {
            spectral,
            pot_shape,
            kinetic_phase,
            scratch,
            dt,
        }
    }

    fn kinetic(&mut self, buf: &mut [Complex<T>]) {
        self.spectral.forward_with_scratch(buf, &mut self.scratch);
        for (v, p) in buf.iter_mut().zip(&self.kinetic_phase) {
            *v = *v * *p;
        }
        self.spectral.inverse_with_scratch(buf, &mut self.scratch);
    }

    /// Strang step of the quintic mean-field equation; the nonlinear phase
    /// uses |psi|^4 frozen over each half-step, which is exact because the
    /// potential phase does not change |psi|.
    fn step_mf(&mut self, psi: &mut [Complex<T>], omega_sq: T) {
        let half_dt = self.dt / T::of(2.0);
        let half_omega = omega_sq / T::of(2.0);
        let g = T::PI() * T::PI() / T::of(2.0);
        for (v, &u) in psi.iter_mut().zip(&self.pot_shape) {
            let rho = v.norm_sqr();
            let phase = (half_omega * u + g * rho * rho) * half_dt;
            *v = *v * Complex::from_polar(T::one(), -phase);
        }
        self.kinetic(psi);
        for (v, &u) in psi.iter_mut().zip(&self.pot_shape) {
            let rho = v.norm_sqr();
            let phase = (half_omega * u + g * rho * rho) * half_dt;
            *v = *v * Complex::from_polar(T::one(), -phase);
        }
    }

    /// Strang step of the linear single-particle equation for a set of
    /// orbitals sharing one potential phase table.
    fn step_orbitals(&mut self, orbitals: &mut [ComplexField<T>], omega_sq: T) {
        let half_dt = self.dt / T::of(2.0);
        let half_omega = omega_sq / T::of(2.0);
        let phases: Vec<Complex<T>> = self
            .pot_shape
            .iter()
            .map(|&u| Complex::from_polar(T::one(), -half_omega * u * half_dt))
            .collect();
        for orb in orbitals.iter_mut() {
            let buf = orb.values_mut();
            for (v, p) in buf.iter_mut().zip(&phases) {
                *v = *v * *p;
            }
            self.kinetic(buf);
            let buf = orb.values_mut();
            for (v, p) in buf.iter_mut().zip(&phases) {
                *v = *v * *p;
            }
        }
    }
}

/// Mean-field ground state at fixed trap (omega_sq, gamma) by imaginary-time
/// split-step evolution with renormalization to N after every step.
pub fn ground_state_mf<T: Real>(
    grid: &Arc<SpatialGrid<T>>,
    n_particles: T,
    omega_sq: T,
    gamma: T,
) -> Result<MeanFieldState<T>> {
    if n_particles <= T::zero() {
        return Err(Error::InvalidParam(
            "particle number must be positive".into(),
        ));
    }
    let mut field = ComplexField::from_real_fn(grid.clone(), |x| {
        T::PI().powf(T::of(-0.25)) * (-x * x / T::of(2.0)).exp()
    });
    field.renormalize(n_particles);
    let pot_shape: Vec<T> = grid
        .xs()
        .iter()
        .map(|&x| x * x + gamma * x.powi(4))
        .collect();
    let spectral = Spectral::new(grid.clone());
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); spectral.scratch_len()];
    let g = T::PI() * T::PI() / T::of(2.0);
    let half_omega = omega_sq / T::of(2.0);

    for &dtau_f in IMAG_TIME_STAGES.iter() {
        let dtau = T::of(dtau_f);
        let tol = T::of(IMAG_TIME_RATE_TOL);
        let kinetic_decay: Vec<T> = grid
            .ks()
            .iter()
            .map(|&k| (-k * k / T::of(2.0) * dtau).exp())
            .collect();
        let mut prev_values = field.values().to_vec();
        let mut converged = false;
        let check_every = 10usize;
        let mut steps = 0usize;
        while steps < IMAG_TIME_MAX_STEPS {
            for _ in 0..check_every {
                let buf = field.values_mut();
                for (v, &u) in buf.iter_mut().zip(&pot_shape) {
                    let rho = v.norm_sqr();
                    let decay = (-(half_omega * u + g * rho * rho) * dtau / T::of(2.0)).exp();
                    *v = v.scale(decay);
                }
                spectral.forward_with_scratch(buf, &mut scratch);
                for (v, &d) in buf.iter_mut().zip(&kinetic_decay) {
                    *v = v.scale(d);
                }
                spectral.inverse_with_scratch(buf, &mut scratch);
                let buf = field.values_mut();
                for (v, &u) in buf.iter_mut().zip(&pot_shape) {
                    let rho = v.norm_sqr();
                    let decay = (-(half_omega * u + g * rho * rho) * dtau / T::of(2.0)).exp();
                    *v = v.scale(decay);
                }
                field.renormalize(n_particles);
                steps += 1;
            }
            let mut diff_sq = T::zero();
            for (a, b) in field.values().iter().zip(&prev_values) {
                diff_sq = diff_sq + (a - b).norm_sqr();
            }
            let diff = (diff_sq * grid.dx()).sqrt();
            let rate = diff / (n_particles.sqrt() * T::of(check_every as f64) * dtau);
            prev_values.copy_from_slice(field.values());
            if rate < tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                what: "mean-field imaginary time",
                steps: IMAG_TIME_MAX_STEPS,
            });
        }
    }
    polish_ground_state(&mut field, &spectral, &pot_shape, n_particles, omega_sq);
    // strip residual global phase; the converged state is real-positive
    let values = field
        .values()
        .iter()
        .map(|v| Complex::new(v.norm() * v.re.signum(), T::zero()))
        .collect();
    let mut field = ComplexField::new(grid.clone(), values)?;
    field.renormalize(n_particles);
    field.check_monitors(None)?;
    Ok(MeanFieldState {
        field,
        n_particles,
        time: T::zero(),
    })
}

/// Drive the seeded state to the discrete nonlinear ground state by damped
/// preconditioned residual iteration: psi <- psi - alpha P [(H[rho] - mu) psi]
/// with the spectral preconditioner P = (k^2/2 + max(mu, 1))^(-1). Unlike
/// split-step imaginary time this has no step-size bias; its fixed point is
/// the discrete eigenstate itself. Best-effort: on hitting the iteration cap
/// the state keeps whatever accuracy the seed and partial polish reached.
fn polish_ground_state<T: Real>(
    field: &mut ComplexField<T>,
    spectral: &Spectral<T>,
    pot_shape: &[T],
    n_particles: T,
    omega_sq: T,
) {
    let grid = field.grid().clone();
    let dx = grid.dx();
    let g = T::PI() * T::PI() / T::of(2.0);
    let half_omega = omega_sq / T::of(2.0);
    let pot: Vec<T> = pot_shape.iter().map(|&u| half_omega * u).collect();
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); spectral.scratch_len()];

    // initial chemical potential fixes the edge mask and the damping factor
    let mu0 = {
        let d2 = field.second_derivative();
        let mut acc = T::zero();
        for ((&v, &dd), &u) in field.values().iter().zip(d2.values()).zip(&pot) {
            let rho = v.norm_sqr();
            let h = -dd.scale(T::of(0.5)) + v.scale(u + g * rho * rho);
            acc = acc + (v.conj() * h).re;
        }
        acc * dx / n_particles
    };
    let c = mu0.max(T::one());
    let cap = mu0 + T::of(POLISH_MASK_RATIO) * c;
    let mask: Vec<bool> = pot.iter().map(|&u| u <= cap).collect();
    let v_active = pot
        .iter()
        .zip(&mask)
        .filter(|(_, &m)| m)
        .map(|(&u, _)| u)
        .fold(T::zero(), |a, b| a.max(b));
    let alpha = (T::of(1.8) * c / (v_active - mu0 + c)).min(T::of(0.8));

    let tol = T::of(POLISH_REL_TOL) * mu0.abs().max(T::one()) * n_particles.sqrt();
    for _ in 0..POLISH_MAX_ITERS {
        let d2 = field.second_derivative();
        let mut mu = T::zero();
        let mut hpsi: Vec<Complex<T>> = field
            .values()
            .iter()
            .zip(d2.values())
            .zip(&pot)
            .map(|((&v, &dd), &u)| {
                let rho = v.norm_sqr();
                let h = -dd.scale(T::of(0.5)) + v.scale(u + g * rho * rho);
                mu = mu + (v.conj() * h).re;
                h
            })
            .collect();
        let mu = mu * dx / n_particles;
        let mut resid_sq = T::zero();
        for ((r, &v), &m) in hpsi.iter_mut().zip(field.values()).zip(&mask) {
            *r = if m {
                *r - v.scale(mu)
            } else {
                Complex::new(T::zero(), T::zero())
            };
            resid_sq = resid_sq + r.norm_sqr();
        }
        if (resid_sq * dx).sqrt() < tol {
            break;
        }
        spectral.forward_with_scratch(&mut hpsi, &mut scratch);
        for (r, &k) in hpsi.iter_mut().zip(grid.ks()) {
            *r = r.scale(alpha / (k * k / T::of(2.0) + c));
        }
        spectral.inverse_with_scratch(&mut hpsi, &mut scratch);
        for (v, r) in field.values_mut().iter_mut().zip(&hpsi) {
            *v = *v - *r;
        }
        field.renormalize(n_particles);
    }
}

/// Lowest `n_orbitals` eigenstates of -1/2 d^2/dx^2 + V by dense
/// diagonalization of the spectral grid Hamiltonian.
pub fn ground_orbitals<T: Real + nalgebra::RealField>(
    grid: &Arc<SpatialGrid<T>>,
    n_orbitals: usize,
    omega_sq: T,
    gamma: T,
) -> Result<OrbitalSet<T>> {
    if n_orbitals == 0 {
        return Err(Error::InvalidParam("need at least one orbital".into()));
    }
    let n = grid.n_points();
    let v = trap_potential(grid.as_ref(), omega_sq, gamma);
    // kinetic part is circulant: first column is the inverse FFT of k^2/2
    let spectral = Spectral::new(grid.clone());
    let mut col: Vec<Complex<T>> = grid
        .ks()
        .iter()
        .map(|&k| Complex::new(k * k / T::of(2.0), T::zero()))
        .collect();
    spectral.inverse(&mut col);
    let kin: Vec<T> = col.iter().map(|c| c.re).collect();
    let h = DMatrix::from_fn(n, n, |a, b| {
        let k = kin[(a + n - b) % n];
        if a == b {
            k + v[a]
        } else {
            k
        }
    });
    let (energies, vectors) = lowest_eigenpairs(h, n_orbitals)?;
    let sqrt_dx = Float::sqrt(grid.dx());
    let mut orbitals = Vec::with_capacity(n_orbitals);
    for vec in vectors {
        // quadrature-normalize and fix the global sign: leading lobe positive
        let mut max_abs = T::zero();
        for &x in &vec {
            max_abs = Float::max(max_abs, Float::abs(x));
        }
        let lead = vec
            .iter()
            .find(|&&x| Float::abs(x) > max_abs / T::of(2.0))
            .copied()
            .unwrap_or(T::one());
        let sign = if lead < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        let values = vec
            .iter()
            .map(|&x| Complex::new(sign * x / sqrt_dx, T::zero()))
            .collect();
        orbitals.push(ComplexField::new(grid.clone(), values)?);
    }
    // the highest requested orbital is the hardest to resolve
    orbitals.last().expect("non-empty").check_monitors(None)?;
    Ok(OrbitalSet {
        orbitals,
        energies,
        time: T::zero(),
    })
}

/// Evolve a mean-field state through the full schedule.
pub fn evolve_mf<T: Real>(
    state: MeanFieldState<T>,
    schedule: &RampSchedule<T>,
    dt: T,
) -> Result<MeanFieldState<T>> {
    evolve_mf_observed(state, schedule, dt, 0, |_, _| {})
}

/// Same, invoking `observer(t, field)` every `observe_every` steps
/// (0 disables observation).
pub fn evolve_mf_observed<T: Real>(
    mut state: MeanFieldState<T>,
    schedule: &RampSchedule<T>,
    dt: T,
    observe_every: usize,
    mut observer: impl FnMut(T, &ComplexField<T>),
) -> Result<MeanFieldState<T>> {
    if dt <= T::zero() {
        return Err(Error::InvalidParam("time step must be positive".into()));
    }
    let t_f = schedule.t_f();
    let steps = (t_f / dt).ceil().to_f64_lossy() as usize;
    let dt_eff = t_f / T::of(steps as f64);
    let mut stepper = Stepper::new(state.field.grid().clone(), schedule.trap().gamma, dt_eff);
    for s in 0..steps {
        let t_mid = (T::of(s as f64) + T::of(0.5)) * dt_eff;
        let omega_sq = schedule.omega_sq(t_mid);
        stepper.step_mf(state.field.values_mut(), omega_sq);
        if (s + 1) % MONITOR_EVERY == 0 {
            state.field.check_monitors(None)?;
        }
        if observe_every > 0 && (s + 1) % observe_every == 0 {
            observer(T::of((s + 1) as f64) * dt_eff, &state.field);
        }
    }
    state.field.check_monitors(None)?;
    state.time = t_f;
    Ok(state)
}

/// Evolve every orbital of the set through the full schedule. Evolution is
/// linear and unitary; no re-orthogonalization is performed, so Gram-matrix
/// drift stays a pure numerics diagnostic.
pub fn evolve_orbitals<T: Real>(
    set: OrbitalSet<T>,
    schedule: &RampSchedule<T>,
    dt: T,
) -> Result<OrbitalSet<T>> {
    evolve_orbitals_observed(set, schedule, dt, 0, |_, _| {})
}

pub fn evolve_orbitals_observed<T: Real>(
    mut set: OrbitalSet<T>,
    schedule: &RampSchedule<T>,
    dt: T,
    observe_every: usize,
    mut observer: impl FnMut(T, &[ComplexField<T>]),
) -> Result<OrbitalSet<T>> {
    if dt <= T::zero() {
        return Err(Error::InvalidParam("time step must be positive".into()));
    }
    if set.is_empty() {
        return Err(Error::InvalidParam("empty orbital set".into()));
    }
    let grid = set.orbitals[0].grid().clone();
    let t_f = schedule.t_f();
    let steps = (t_f / dt).ceil().to_f64_lossy() as usize;
    let dt_eff = t_f / T::of(steps as f64);
    let mut stepper = Stepper::new(grid, schedule.trap().gamma, dt_eff);
    for s in 0..steps {
        let t_mid = (T::of(s as f64) + T::of(0.5)) * dt_eff;
        let omega_sq = schedule.omega_sq(t_mid);
        stepper.step_orbitals(&mut set.orbitals, omega_sq);
        if (s + 1) % MONITOR_EVERY == 0 {
            for orb in &set.orbitals {
                orb.check_monitors(None)?;
            }
        }
        if observe_every > 0 && (s + 1) % observe_every == 0 {
            observer(T::of((s + 1) as f64) * dt_eff, &set.orbitals);
        }
    }
    for orb in &set.orbitals {
        orb.check_monitors(None)?;
    }
    set.time = t_f;
    Ok(set)
}

/// Mean-field energy functional: kinetic + trap + quintic interaction.
pub fn energy_mf<T: Real>(state: &MeanFieldState<T>, omega_sq: T, gamma: T) -> T {
    energy_mf_field(&state.field, omega_sq, gamma)
}

fn energy_mf_field<T: Real>(field: &ComplexField<T>, omega_sq: T, gamma: T) -> T {
    let grid = field.grid();
    let dx = grid.dx();
    let kinetic = kinetic_energy(field);
    let mut pot = T::zero();
    let mut interaction = T::zero();
    let g = T::PI() * T::PI() / T::of(6.0);
    for (&x, v) in grid.xs().iter().zip(field.values()) {
        let rho = v.norm_sqr();
        pot = pot + T::of(0.5) * omega_sq * (x * x + gamma * x.powi(4)) * rho;
        interaction = interaction + g * rho * rho * rho;
    }
    kinetic + dx * (pot + interaction)
}

/// Total single-particle energy of an orbital set in a static trap.
pub fn energy_orbitals<T: Real>(set: &OrbitalSet<T>, omega_sq: T, gamma: T) -> T {
    let mut total = T::zero();
    for orb in &set.orbitals {
        let grid = orb.grid();
        let mut pot = T::zero();
        for (&x, v) in grid.xs().iter().zip(orb.values()) {
            pot = pot + T::of(0.5) * omega_sq * (x * x + gamma * x.powi(4)) * v.norm_sqr();
        }
        total = total + kinetic_energy(orb) + grid.dx() * pot;
    }
    total
}

/// dx/n * sum k^2/2 |f_hat|^2 (Parseval form of the kinetic energy).
fn kinetic_energy<T: Real>(field: &ComplexField<T>) -> T {
    let grid = field.grid();
    let spectral = Spectral::new(grid.clone());
    let mut buf = field.values().to_vec();
    spectral.forward(&mut buf);
    let mut acc = T::zero();
    for (v, &k) in buf.iter().zip(grid.ks()) {
        acc = acc + k * k / T::of(2.0) * v.norm_sqr();
    }
    acc * grid.dx() / T::of(grid.n_points() as f64)
}
