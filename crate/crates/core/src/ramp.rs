//! Trap-frequency schedules: exact harmonic shortcut (Ermakov), variational
//! anharmonic shortcut, and the adiabatic reference ramp.
//!
//! Schedules store omega^2(t), never omega(t): fast ramps legitimately pass
//! through omega^2 < 0 (transient expulsive trap) and must not be clipped.
//! Everything is evaluated analytically from the quintic scaling polynomial,
//! so ramp evaluation is grid-free and noise-free.

use std::io::Write;

use crate::ansatz::{gaussian_integrals, tf_integrals, AnsatzIntegrals, AnsatzKind};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Trap parameters in scaled units (hbar = m = omega_0 = 1).
#[derive(Debug, Clone, Copy)]
pub struct TrapSpec<T: Real> {
    pub omega0_sq: T,
    pub omegaf_sq: T,
    pub gamma: T,
    pub t_f: T,
}

impl<T: Real> TrapSpec<T> {
    pub fn new(omega0_sq: T, omegaf_sq: T, gamma: T, t_f: T) -> Result<Self> {
        if omega0_sq <= T::zero() || omegaf_sq <= T::zero() {
            return Err(Error::InvalidParam(
                "endpoint squared frequencies must be positive".into(),
            ));
        }
        if t_f <= T::zero() {
            return Err(Error::InvalidParam("ramp duration must be positive".into()));
        }
        if gamma < T::zero() {
            return Err(Error::InvalidParam(
                "anharmonicity must be non-negative".into(),
            ));
        }
        Ok(Self {
            omega0_sq,
            omegaf_sq,
            gamma,
            t_f,
        })
    }
}

/// Quintic scaling polynomial b(t) with b, b', b'' pinned at both ends.
#[derive(Debug, Clone, Copy)]
pub struct ScalingPoly<T: Real> {
    coeffs: [T; 6],
    t_f: T,
    b0: T,
    bf: T,
}

impl<T: Real> ScalingPoly<T> {
    /// The unique quintic with b(0) = b0, b(t_f) = bf and vanishing first
    /// and second derivatives at both ends:
    /// b0 + (bf - b0)(10 s^3 - 15 s^4 + 6 s^5), s = t/t_f.
    pub fn smoothstep(b0: T, bf: T, t_f: T) -> Result<Self> {
        if b0 <= T::zero() || bf <= T::zero() {
            return Err(Error::InvalidParam(
                "boundary scaling factors must be positive".into(),
            ));
        }
        if t_f <= T::zero() {
            return Err(Error::InvalidParam("ramp duration must be positive".into()));
        }
        let d = bf - b0;
        let coeffs = [
            b0,
            T::zero(),
            T::zero(),
            T::of(10.0) * d / t_f.powi(3),
            T::of(-15.0) * d / t_f.powi(4),
            T::of(6.0) * d / t_f.powi(5),
        ];
        let poly = Self {
            coeffs,
            t_f,
            b0,
            bf,
        };
        poly.validate()?;
        Ok(poly)
    }

    fn validate(&self) -> Result<()> {
        let tol = T::of(1e-10);
        let checks = [
            (self.b(T::zero()) - self.b0, "b(0)"),
            (self.b(self.t_f) - self.bf, "b(t_f)"),
            (self.b_dot(T::zero()), "b'(0)"),
            (self.b_dot(self.t_f), "b'(t_f)"),
            (self.b_ddot(T::zero()), "b''(0)"),
            (self.b_ddot(self.t_f), "b''(t_f)"),
        ];
        for (residual, name) in checks {
            if residual.abs() > tol * self.b0.max(self.bf).max(T::one()) {
                return Err(Error::InvalidParam(format!(
                    "scaling polynomial boundary condition {name} violated: {residual:e}"
                )));
            }
        }
        // positivity on a dense sample
        for i in 0..=2000 {
            let t = self.t_f * T::of(i as f64 / 2000.0);
            if self.b(t) <= T::zero() {
                return Err(Error::InvalidParam(format!(
                    "scaling polynomial is non-positive at t = {t}"
                )));
            }
        }
        Ok(())
    }

    pub fn b(&self, t: T) -> T {
        let c = &self.coeffs;
        ((((c[5] * t + c[4]) * t + c[3]) * t + c[2]) * t + c[1]) * t + c[0]
    }

    pub fn b_dot(&self, t: T) -> T {
        let c = &self.coeffs;
        (((T::of(5.0) * c[5] * t + T::of(4.0) * c[4]) * t + T::of(3.0) * c[3]) * t
            + T::of(2.0) * c[2])
            * t
            + c[1]
    }

    pub fn b_ddot(&self, t: T) -> T {
        let c = &self.coeffs;
        ((T::of(20.0) * c[5] * t + T::of(12.0) * c[4]) * t + T::of(6.0) * c[3]) * t
            + T::of(2.0) * c[2]
    }

    pub fn coeffs(&self) -> &[T; 6] {
        &self.coeffs
    }

    pub fn t_f(&self) -> T {
        self.t_f
    }

    pub fn b0(&self) -> T {
        self.b0
    }

    pub fn bf(&self) -> T {
        self.bf
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RampKind {
    ErmakovSta,
    VariationalSta,
    Reference,
}

impl std::fmt::Display for RampKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RampKind::ErmakovSta => write!(f, "sta-ermakov"),
            RampKind::VariationalSta => write!(f, "sta-variational"),
            RampKind::Reference => write!(f, "reference"),
        }
    }
}

/// An evaluable omega^2(t) schedule on [0, t_f].
#[derive(Debug, Clone)]
pub struct RampSchedule<T: Real> {
    kind: RampKind,
    trap: TrapSpec<T>,
    poly: ScalingPoly<T>,
    integrals: Option<AnsatzIntegrals<T>>,
}

impl<T: Real> RampSchedule<T> {
    /// Exact harmonic shortcut: omega^2(t) = omega0^2 / b^4 - b'' / b,
    /// with b(0) = 1, b(t_f) = (omega0/omega_f)^(1/2). Harmonic traps only.
    pub fn ermakov(trap: TrapSpec<T>) -> Result<Self> {
        if trap.gamma != T::zero() {
            return Err(Error::InvalidParam(
                "the Ermakov shortcut is defined for harmonic traps only (gamma = 0)".into(),
            ));
        }
        let bf = (trap.omega0_sq / trap.omegaf_sq).powf(T::of(0.25));
        let poly = ScalingPoly::smoothstep(T::one(), bf, trap.t_f)?;
        let ramp = Self {
            kind: RampKind::ErmakovSta,
            trap,
            poly,
            integrals: None,
        };
        ramp.check_endpoints()?;
        Ok(ramp)
    }

    /// Adiabatic-limit reference for the harmonic trap: the same b(t) with
    /// the b'' term dropped, omega^2(t) = omega0^2 / b^4.
    pub fn reference(trap: TrapSpec<T>) -> Result<Self> {
        if trap.gamma != T::zero() {
            return Err(Error::InvalidParam(
                "use reference_anharmonic for gamma > 0".into(),
            ));
        }
        let bf = (trap.omega0_sq / trap.omegaf_sq).powf(T::of(0.25));
        let poly = ScalingPoly::smoothstep(T::one(), bf, trap.t_f)?;
        let ramp = Self {
            kind: RampKind::Reference,
            trap,
            poly,
            integrals: None,
        };
        ramp.check_endpoints()?;
        Ok(ramp)
    }

    /// Variational shortcut from the Euler-Lagrange equations of the scaled
    /// ansatz: omega^2 = [(F + pi^2 K/3) - b'' b^3 W] / (b^4 [W + 2 b^2 gamma J]).
    pub fn variational(trap: TrapSpec<T>, ansatz: AnsatzKind, n_particles: T) -> Result<Self> {
        let integrals = ansatz_integrals(ansatz, n_particles, trap.gamma)?;
        let (b0, bf) = boundary_b(&trap, &integrals)?;
        let poly = ScalingPoly::smoothstep(b0, bf, trap.t_f)?;
        let ramp = Self {
            kind: RampKind::VariationalSta,
            trap,
            poly,
            integrals: Some(integrals),
        };
        ramp.check_endpoints()?;
        Ok(ramp)
    }

    /// Reference ramp for an anharmonic trap: the variational expression
    /// with the b'' term deleted, sharing b(t), b0 and bf with the
    /// corresponding variational shortcut.
    pub fn reference_anharmonic(
        trap: TrapSpec<T>,
        ansatz: AnsatzKind,
        n_particles: T,
    ) -> Result<Self> {
        let integrals = ansatz_integrals(ansatz, n_particles, trap.gamma)?;
        let (b0, bf) = boundary_b(&trap, &integrals)?;
        let poly = ScalingPoly::smoothstep(b0, bf, trap.t_f)?;
        let ramp = Self {
            kind: RampKind::Reference,
            trap,
            poly,
            integrals: Some(integrals),
        };
        ramp.check_endpoints()?;
        Ok(ramp)
    }

    fn check_endpoints(&self) -> Result<()> {
        let tol = T::of(1e-8);
        let at0 = self.omega_sq(T::zero());
        let atf = self.omega_sq(self.trap.t_f);
        if ((at0 - self.trap.omega0_sq) / self.trap.omega0_sq).abs() > tol
            || ((atf - self.trap.omegaf_sq) / self.trap.omegaf_sq).abs() > tol
        {
            return Err(Error::InvalidParam(format!(
                "schedule endpoints violated: omega^2(0) = {at0}, omega^2(t_f) = {atf}"
            )));
        }
        Ok(())
    }

    /// The squared trap frequency at time t. May be negative.
    pub fn omega_sq(&self, t: T) -> T {
        let b = self.poly.b(t);
        match (self.kind, &self.integrals) {
            (RampKind::ErmakovSta, _) => self.trap.omega0_sq / b.powi(4) - self.poly.b_ddot(t) / b,
            (RampKind::Reference, None) => self.trap.omega0_sq / b.powi(4),
            (RampKind::VariationalSta, Some(ints)) => {
                eq_variational(b, self.poly.b_ddot(t), ints, self.trap.gamma)
            }
            (RampKind::Reference, Some(ints)) => {
                eq_variational(b, T::zero(), ints, self.trap.gamma)
            }
            (RampKind::VariationalSta, None) => unreachable!("variational ramp without integrals"),
        }
    }

    pub fn kind(&self) -> RampKind {
        self.kind
    }

    pub fn trap(&self) -> &TrapSpec<T> {
        &self.trap
    }

    pub fn poly(&self) -> &ScalingPoly<T> {
        &self.poly
    }

    pub fn integrals(&self) -> Option<&AnsatzIntegrals<T>> {
        self.integrals.as_ref()
    }

    pub fn t_f(&self) -> T {
        self.trap.t_f
    }

    /// max_t |omega^2(t)| over a dense sample; used by time-step policies.
    pub fn max_abs_omega_sq(&self, samples: usize) -> T {
        let mut m = T::zero();
        for i in 0..=samples {
            let t = self.trap.t_f * T::of(i as f64 / samples as f64);
            m = m.max(self.omega_sq(t).abs());
        }
        m
    }

    /// CSV export: t, b, b_dot, b_ddot, omega_sq with metadata header.
    pub fn write_csv<W: Write>(&self, w: &mut W, n_samples: usize) -> Result<()> {
        writeln!(w, "# kind = {}", self.kind)?;
        writeln!(w, "# t_f = {}", self.trap.t_f)?;
        writeln!(w, "# omega0_sq = {}", self.trap.omega0_sq)?;
        writeln!(w, "# omegaf_sq = {}", self.trap.omegaf_sq)?;
        writeln!(w, "# gamma = {}", self.trap.gamma)?;
        if let Some(ints) = &self.integrals {
            writeln!(w, "# ansatz = {}", ints.kind)?;
            writeln!(w, "# n_particles = {}", ints.n_particles)?;
        }
        writeln!(w, "# b0 = {}", self.poly.b0)?;
        writeln!(w, "# bf = {}", self.poly.bf)?;
        writeln!(w, "t,b,b_dot,b_ddot,omega_sq")?;
        for i in 0..=n_samples {
            let t = self.trap.t_f * T::of(i as f64 / n_samples as f64);
            writeln!(
                w,
                "{},{},{},{},{}",
                t,
                self.poly.b(t),
                self.poly.b_dot(t),
                self.poly.b_ddot(t),
                self.omega_sq(t)
            )?;
        }
        Ok(())
    }
}

fn ansatz_integrals<T: Real>(
    ansatz: AnsatzKind,
    n_particles: T,
    gamma: T,
) -> Result<AnsatzIntegrals<T>> {
    if n_particles <= T::zero() {
        return Err(Error::InvalidParam(
            "particle number must be positive".into(),
        ));
    }
    match ansatz {
        AnsatzKind::Gaussian => {
            let mut ints = gaussian_integrals(n_particles);
            ints.gamma = gamma;
            Ok(ints)
        }
        AnsatzKind::ThomasFermi => tf_integrals(n_particles, gamma),
    }
}

/// The variational ramp expression evaluated along (b, b'').
pub fn eq_variational<T: Real>(b: T, b_ddot: T, ints: &AnsatzIntegrals<T>, gamma: T) -> T {
    let num = ints.restoring_constant() - b_ddot * b.powi(3) * ints.w;
    let den = b.powi(4) * (ints.w + T::of(2.0) * b * b * gamma * ints.j);
    num / den
}

/// Boundary scaling factors (b0, bf): the positive roots of
/// 2 gamma J b^6 + W b^4 = (F + pi^2 K / 3) / omega^2 at both endpoints.
/// The left side is strictly increasing for b > 0, so the root is unique.
pub fn boundary_b<T: Real>(trap: &TrapSpec<T>, ints: &AnsatzIntegrals<T>) -> Result<(T, T)> {
    let c = ints.restoring_constant();
    let solve = |omega_sq: T, endpoint: &'static str| -> Result<T> {
        if c <= T::zero() {
            return Err(Error::NoBoundaryRoot {
                endpoint,
                constant: c.to_f64_lossy(),
            });
        }
        let target = c / omega_sq;
        let g = |b: T| {
            let b2 = b * b;
            T::of(2.0) * trap.gamma * ints.j * b2.powi(3) + ints.w * b2 * b2 - target
        };
        let mut hi = T::one();
        let mut iters = 0;
        while g(hi) < T::zero() {
            hi = hi * T::of(2.0);
            iters += 1;
            if iters > 200 {
                return Err(Error::NonConvergence {
                    what: "boundary root bracket",
                    steps: iters,
                });
            }
        }
        let mut lo = T::zero();
        for _ in 0..200 {
            let mid = (lo + hi) / T::of(2.0);
            if g(mid) < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= hi * T::of(1e-15) {
                break;
            }
        }
        Ok((lo + hi) / T::of(2.0))
    };
    Ok((
        solve(trap.omega0_sq, "initial")?,
        solve(trap.omegaf_sq, "final")?,
    ))
}
