//! Figures of merit: density profiles, density overlap and many-body
//! fidelity.
//!
//! The density overlap normalizes both profiles to unit weight before the
//! Bhattacharyya integral so that it saturates at 1 when the target is
//! reached. The fidelity is |det A|^2 with A the matrix of single-particle
//! overlaps; |det| is accumulated in log-magnitude so that deep
//! orthogonality-catastrophe values do not underflow.

use std::io::Write;

use num_complex::Complex;

use crate::dynamics::{MeanFieldState, OrbitalSet};
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::scalar::Real;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct DensityProfile<T: Real> {
    grid: Arc<SpatialGrid<T>>,
    values: Vec<T>,
    total: T,
}

impl<T: Real> DensityProfile<T> {
    /// Wrap raw density samples; negative round-off down to -1e-14 is
    /// clipped to zero, anything more negative is rejected.
    pub fn new(grid: Arc<SpatialGrid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::SizeMismatch(values.len(), grid.n_points()));
        }
        let floor = T::of(-1e-14);
        let mut clipped = Vec::with_capacity(values.len());
        for v in values {
            if !v.is_finite() || v < floor {
                return Err(Error::InvalidParam(format!(
                    "density sample {v} is not a valid non-negative value"
                )));
            }
            clipped.push(v.max(T::zero()));
        }
        let total = grid.dx() * clipped.iter().fold(T::zero(), |a, &b| a + b);
        if total <= T::zero() {
            return Err(Error::ZeroDensity);
        }
        Ok(Self {
            grid,
            values: clipped,
            total,
        })
    }

    pub fn grid(&self) -> &Arc<SpatialGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Quadrature of the profile (particle number for model densities).
    pub fn total(&self) -> T {
        self.total
    }

    pub fn max_value(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &b| a.max(b))
    }

    /// Count of strict local maxima above a noise floor; used to detect
    /// Friedel oscillations.
    pub fn local_maxima(&self) -> usize {
        let floor = self.max_value() * T::of(1e-6);
        let mut count = 0;
        for i in 1..self.values.len() - 1 {
            if self.values[i] > floor
                && self.values[i] > self.values[i - 1]
                && self.values[i] > self.values[i + 1]
            {
                count += 1;
            }
        }
        count
    }

    pub fn write_csv<W: Write>(&self, w: &mut W, metadata: &[(&str, String)]) -> Result<()> {
        for (key, val) in metadata {
            writeln!(w, "# {key} = {val}")?;
        }
        writeln!(w, "x,density")?;
        for (&x, &rho) in self.grid.xs().iter().zip(&self.values) {
            writeln!(w, "{x},{rho}")?;
        }
        Ok(())
    }
}

/// rho = |psi|^2 of a mean-field state.
pub fn density_mf<T: Real>(state: &MeanFieldState<T>) -> DensityProfile<T> {
    DensityProfile::new(state.field.grid().clone(), state.field.density())
        .expect("|psi|^2 is a valid density")
}

/// rho = sum_j |phi_j|^2 of an orbital set.
pub fn density_tg<T: Real>(set: &OrbitalSet<T>) -> DensityProfile<T> {
    let grid = set.orbitals[0].grid().clone();
    let mut values = vec![T::zero(); grid.n_points()];
    for orb in &set.orbitals {
        for (acc, v) in values.iter_mut().zip(orb.values()) {
            *acc = *acc + v.norm_sqr();
        }
    }
    DensityProfile::new(grid, values).expect("sum of |phi|^2 is a valid density")
}

/// Thomas-Fermi profile rho = (1/pi) sqrt(max(0, 2 mu - omega^2 (x^2 + gamma x^4)))
/// with mu fixed so the grid quadrature equals N, then normalized to N.
pub fn tf_density<T: Real>(
    grid: &Arc<SpatialGrid<T>>,
    n_particles: T,
    omega_sq: T,
    gamma: T,
) -> Result<DensityProfile<T>> {
    if n_particles <= T::zero() {
        return Err(Error::InvalidParam(
            "particle number must be positive".into(),
        ));
    }
    let pi = T::PI();
    let profile_total = |mu: T| -> T {
        let mut acc = T::zero();
        for &x in grid.xs() {
            let arg = T::of(2.0) * mu - omega_sq * (x * x + gamma * x.powi(4));
            if arg > T::zero() {
                acc = acc + arg.sqrt() / pi;
            }
        }
        acc * grid.dx()
    };
    let mut hi = T::one();
    let mut iters = 0;
    while profile_total(hi) < n_particles {
        hi = hi * T::of(2.0);
        iters += 1;
        if iters > 200 {
            return Err(Error::NonConvergence {
                what: "TF density chemical potential bracket",
                steps: iters,
            });
        }
    }
    let mut lo = T::zero();
    for _ in 0..200 {
        let mid = (lo + hi) / T::of(2.0);
        if profile_total(mid) < n_particles {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= hi * T::of(1e-14) {
            break;
        }
    }
    let mu = (lo + hi) / T::of(2.0);
    let values: Vec<T> = grid
        .xs()
        .iter()
        .map(|&x| {
            let arg = T::of(2.0) * mu - omega_sq * (x * x + gamma * x.powi(4));
            if arg > T::zero() {
                arg.sqrt() / pi
            } else {
                T::zero()
            }
        })
        .collect();
    let mut profile = DensityProfile::new(grid.clone(), values)?;
    let scale = n_particles / profile.total;
    for v in &mut profile.values {
        *v = *v * scale;
    }
    profile.total = n_particles;
    Ok(profile)
}

/// Bhattacharyya overlap of unit-normalized densities, in [0, 1].
pub fn density_overlap<T: Real>(a: &DensityProfile<T>, b: &DensityProfile<T>) -> Result<T> {
    if a.grid.as_ref() != b.grid.as_ref() {
        return Err(Error::GridMismatch);
    }
    let dx = a.grid.dx();
    let mut acc = T::zero();
    for (&pa, &pb) in a.values.iter().zip(&b.values) {
        acc = acc + (pa / a.total * pb / b.total).sqrt();
    }
    let o = (dx * acc).powi(2);
    Ok(o.min(T::one()).max(T::zero()))
}

/// Matrix of single-particle overlaps A_lm = <phi_l(final), phi_m(target)>.
#[derive(Debug, Clone)]
pub struct OverlapMatrix<T: Real> {
    n: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> OverlapMatrix<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, l: usize, m: usize) -> Complex<T> {
        self.entries[l * self.n + m]
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    /// |det|^2 by pivoted Gaussian elimination with log-magnitude
    /// accumulation.
    pub fn abs_det_sq(&self) -> T {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut log_abs = T::zero();
        for k in 0..n {
            let mut pivot = k;
            let mut best = a[k * n + k].norm_sqr();
            for r in k + 1..n {
                let mag = a[r * n + k].norm_sqr();
                if mag > best {
                    best = mag;
                    pivot = r;
                }
            }
            if best == T::zero() {
                return T::zero();
            }
            if pivot != k {
                for c in 0..n {
                    a.swap(k * n + c, pivot * n + c);
                }
            }
            let diag = a[k * n + k];
            log_abs = log_abs + diag.norm().ln();
            for r in k + 1..n {
                let factor = a[r * n + k] / diag;
                for c in k..n {
                    let sub = factor * a[k * n + c];
                    a[r * n + c] = a[r * n + c] - sub;
                }
            }
        }
        (T::of(2.0) * log_abs).exp()
    }
}

pub fn overlap_matrix<T: Real>(
    final_set: &OrbitalSet<T>,
    target_set: &OrbitalSet<T>,
) -> Result<OverlapMatrix<T>> {
    if final_set.len() != target_set.len() {
        return Err(Error::SizeMismatch(final_set.len(), target_set.len()));
    }
    let n = final_set.len();
    let mut entries = Vec::with_capacity(n * n);
    for l in 0..n {
        for m in 0..n {
            entries.push(final_set.orbitals[l].inner_product(&target_set.orbitals[m])?);
        }
    }
    Ok(OverlapMatrix { n, entries })
}

/// Many-body fidelity F = |det A|^2, clamped to [0, 1] against round-off.
pub fn many_body_fidelity<T: Real>(
    final_set: &OrbitalSet<T>,
    target_set: &OrbitalSet<T>,
) -> Result<T> {
    let a = overlap_matrix(final_set, target_set)?;
    let f = a.abs_det_sq();
    Ok(f.min(T::one()).max(T::zero()))
}
