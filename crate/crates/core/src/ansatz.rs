//! Variational ansatz integrals (N, mu, W, F, J, K) for the Gaussian and
//! Thomas-Fermi trial profiles.
//!
//! Thomas-Fermi integrals use the factorization
//! 2 mu - y^2 - gamma y^4 = (R^2 - y^2)(1 + gamma (R^2 + y^2)),
//! which turns every moment into a smooth integrand under y = R sin(theta).
//! The kinetic integral F diverges at the support edge like (R-y)^(-3/2);
//! its Hadamard finite part is evaluated by integrating by parts in the
//! theta variable, which removes the divergent boundary term exactly and
//! leaves a smooth integrand. At gamma = 0 this reproduces F = -1/4.

use crate::error::{Error, Result};
use crate::quad::integrate;
use crate::scalar::Real;

const QUAD_POINTS: usize = 240;
const MU_MAX_ITER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzKind {
    Gaussian,
    ThomasFermi,
}

impl std::fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnsatzKind::Gaussian => write!(f, "gaussian"),
            AnsatzKind::ThomasFermi => write!(f, "thomas-fermi"),
        }
    }
}

/// The integral record entering the variational ramp.
#[derive(Debug, Clone, Copy)]
pub struct AnsatzIntegrals<T: Real> {
    pub n_particles: T,
    /// Chemical potential; only meaningful for the Thomas-Fermi ansatz.
    pub mu: Option<T>,
    pub w: T,
    pub f: T,
    pub j: T,
    pub k: T,
    pub kind: AnsatzKind,
    pub gamma: T,
}

impl<T: Real> AnsatzIntegrals<T> {
    /// F + pi^2 K / 3, the restoring constant of the variational ramp.
    pub fn restoring_constant(&self) -> T {
        self.f + T::PI() * T::PI() * self.k / T::of(3.0)
    }
}

/// Closed-form integrals for phi_G(y) = sqrt(N) (2/pi)^(1/4) exp(-y^2).
pub fn gaussian_integrals<T: Real>(n_particles: T) -> AnsatzIntegrals<T> {
    let pi = T::PI();
    AnsatzIntegrals {
        n_particles,
        mu: None,
        w: n_particles / T::of(4.0),
        f: n_particles,
        j: T::of(3.0) * n_particles / T::of(16.0),
        k: T::of(2.0) * n_particles.powi(3) / (T::of(3.0).sqrt() * pi),
        kind: AnsatzKind::Gaussian,
        gamma: T::zero(),
    }
}

/// Positive edge R of the Thomas-Fermi support, 2 mu = R^2 + gamma R^4.
pub fn tf_radius<T: Real>(mu: T, gamma: T) -> T {
    if gamma == T::zero() {
        (T::of(2.0) * mu).sqrt()
    } else {
        let r2 = ((T::one() + T::of(8.0) * gamma * mu).sqrt() - T::one()) / (T::of(2.0) * gamma);
        r2.sqrt()
    }
}

/// Particle number carried by the TF profile at chemical potential mu:
/// N(mu) = (1/pi) integral sqrt(2 mu - y^2 - gamma y^4) dy over the support.
pub fn tf_particle_number<T: Real>(mu: T, gamma: T) -> T {
    let r = tf_radius(mu, gamma);
    let pi = T::PI();
    let half_pi = pi / T::of(2.0);
    let v = integrate(
        |theta: T| {
            let y = r * theta.sin();
            let c = theta.cos();
            r * r * c * c * (T::one() + gamma * (r * r + y * y)).sqrt()
        },
        T::zero(),
        half_pi,
        QUAD_POINTS,
    );
    T::of(2.0) / pi * v
}

/// Invert N(mu) = n by bisection; N is strictly increasing in mu.
pub fn tf_chemical_potential<T: Real>(n_particles: T, gamma: T) -> Result<T> {
    if n_particles <= T::zero() {
        return Err(Error::InvalidParam(format!(
            "particle number must be positive, got {n_particles}"
        )));
    }
    if gamma < T::zero() {
        return Err(Error::InvalidParam(format!(
            "anharmonicity must be non-negative, got {gamma}"
        )));
    }
    if gamma == T::zero() {
        // exact: N = R^2 / 2 = mu
        return Ok(n_particles);
    }
    let mut hi = n_particles.max(T::one());
    let mut iters = 0;
    while tf_particle_number(hi, gamma) < n_particles {
        hi = hi * T::of(2.0);
        iters += 1;
        if iters > 200 {
            return Err(Error::NonConvergence {
                what: "chemical potential bracket",
                steps: iters,
            });
        }
    }
    let mut lo = T::zero();
    for _ in 0..MU_MAX_ITER {
        let mid = (lo + hi) / T::of(2.0);
        if tf_particle_number(mid, gamma) < n_particles {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= hi * T::of(1e-15) {
            return Ok((lo + hi) / T::of(2.0));
        }
    }
    Err(Error::NonConvergence {
        what: "chemical potential bisection",
        steps: MU_MAX_ITER,
    })
}

/// Even moment integral y^m |phi_TF|^2 for m in {0, 2, 4}.
fn tf_moment<T: Real>(mu: T, gamma: T, m: i32) -> T {
    let r = tf_radius(mu, gamma);
    let pi = T::PI();
    let half_pi = pi / T::of(2.0);
    let v = integrate(
        |theta: T| {
            let y = r * theta.sin();
            let c = theta.cos();
            y.powi(m) * r * r * c * c * (T::one() + gamma * (r * r + y * y)).sqrt()
        },
        T::zero(),
        half_pi,
        QUAD_POINTS,
    );
    T::of(2.0) / pi * v
}

/// K = integral |phi_TF|^6 dy.
fn tf_k_integral<T: Real>(mu: T, gamma: T) -> T {
    let r = tf_radius(mu, gamma);
    let pi = T::PI();
    let half_pi = pi / T::of(2.0);
    let v = integrate(
        |theta: T| {
            let y = r * theta.sin();
            let c = theta.cos();
            c.powi(4) * (T::one() + gamma * (r * r + y * y)).powi(3).sqrt()
        },
        T::zero(),
        half_pi,
        QUAD_POINTS,
    );
    T::of(2.0) * r.powi(4) / pi.powi(3) * v
}

/// Hadamard finite part of F = integral (d phi_TF / dy)^2 dy.
///
/// With u = 2 mu - y^2 - gamma y^4 the integrand is u'^2 u^(-3/2) / (16 pi);
/// writing u = (R^2 - y^2) g(y), g = 1 + gamma (R^2 + y^2), and substituting
/// y = R sin(theta), integration by parts against sec^2(theta) cancels the
/// divergent boundary term of the finite part and gives
/// F = -(1 / (8 pi R^2)) integral_0^(pi/2) P'(y) R sin(theta) d(theta),
/// with P = u'^2 g^(-3/2).
fn tf_f_finite_part<T: Real>(mu: T, gamma: T) -> T {
    let r = tf_radius(mu, gamma);
    let pi = T::PI();
    let half_pi = pi / T::of(2.0);
    let p_prime = |y: T| {
        let g = T::one() + gamma * (r * r + y * y);
        let up = -(T::of(2.0) * y + T::of(4.0) * gamma * y.powi(3));
        let upp = -(T::of(2.0) + T::of(12.0) * gamma * y * y);
        T::of(2.0) * up * upp * g.powf(T::of(-1.5))
            - T::of(3.0) * gamma * y * up * up * g.powf(T::of(-2.5))
    };
    let v = integrate(
        |theta: T| {
            let y = r * theta.sin();
            p_prime(y) * y
        },
        T::zero(),
        half_pi,
        QUAD_POINTS,
    );
    -v / (T::of(8.0) * pi * r * r)
}

/// Thomas-Fermi integrals. At gamma = 0 the closed forms
/// W = N^2/2, J = N^3/2, K = 3 N^2 / (2 pi^2), F = -1/4 are returned;
/// anharmonic traps go through quadrature.
pub fn tf_integrals<T: Real>(n_particles: T, gamma: T) -> Result<AnsatzIntegrals<T>> {
    let mu = tf_chemical_potential(n_particles, gamma)?;
    if gamma == T::zero() {
        let pi = T::PI();
        return Ok(AnsatzIntegrals {
            n_particles,
            mu: Some(mu),
            w: n_particles * n_particles / T::of(2.0),
            f: T::of(-0.25),
            j: n_particles.powi(3) / T::of(2.0),
            k: T::of(3.0) * n_particles * n_particles / (T::of(2.0) * pi * pi),
            kind: AnsatzKind::ThomasFermi,
            gamma,
        });
    }
    Ok(tf_integrals_at_mu(n_particles, mu, gamma))
}

/// Quadrature path regardless of gamma; the gamma = 0 closed forms above are
/// checked against this in tests.
pub fn tf_integrals_quadrature<T: Real>(n_particles: T, gamma: T) -> Result<AnsatzIntegrals<T>> {
    let mu = tf_chemical_potential(n_particles, gamma)?;
    Ok(tf_integrals_at_mu(n_particles, mu, gamma))
}

fn tf_integrals_at_mu<T: Real>(n_particles: T, mu: T, gamma: T) -> AnsatzIntegrals<T> {
    AnsatzIntegrals {
        n_particles,
        mu: Some(mu),
        w: tf_moment(mu, gamma, 2),
        f: tf_f_finite_part(mu, gamma),
        j: tf_moment(mu, gamma, 4),
        k: tf_k_integral(mu, gamma),
        kind: AnsatzKind::ThomasFermi,
        gamma,
    }
}
