//! Complex wavefunctions sampled on a [`SpatialGrid`].
//!
//! Norm semantics follow the particle-number convention: `norm` is the
//! quadrature of |f|^2, so a mean-field state carries norm N. On a periodic
//! grid with decayed fields the rectangle rule is spectrally accurate.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::scalar::Real;
use crate::spectral::Spectral;

/// Fraction of nodes (total, split between both ends) watched by the
/// edge-mass monitor.
pub const EDGE_NODE_FRACTION: f64 = 0.05;
/// Fraction of the |k| range counted as spectral tail.
pub const TAIL_K_FRACTION: f64 = 0.10;
/// Default monitor thresholds on the norm fractions.
pub const MONITOR_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ComplexField<T: Real> {
    grid: Arc<SpatialGrid<T>>,
    values: Vec<Complex<T>>,
}

impl<T: Real> ComplexField<T> {
    pub fn new(grid: Arc<SpatialGrid<T>>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::SizeMismatch(values.len(), grid.n_points()));
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_values_unchecked(
        grid: Arc<SpatialGrid<T>>,
        values: Vec<Complex<T>>,
    ) -> Self {
        Self { grid, values }
    }

    pub fn from_fn(grid: Arc<SpatialGrid<T>>, f: impl Fn(T) -> Complex<T>) -> Self {
        let values = grid.xs().iter().map(|&x| f(x)).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Arc<SpatialGrid<T>>, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(grid, |x| Complex::new(f(x), T::zero()))
    }

    pub fn zeros(grid: Arc<SpatialGrid<T>>) -> Self {
        let values = vec![Complex::new(T::zero(), T::zero()); grid.n_points()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<SpatialGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    /// dx * sum |f_i|^2 (fixed summation order, deterministic).
    pub fn norm(&self) -> T {
        let s = self
            .values
            .iter()
            .fold(T::zero(), |acc, v| acc + v.norm_sqr());
        self.grid.dx() * s
    }

    /// dx * sum conj(f_i) g_i.
    pub fn inner_product(&self, other: &Self) -> Result<Complex<T>> {
        if self.grid.as_ref() != other.grid.as_ref() {
            return Err(Error::GridMismatch);
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for (a, b) in self.values.iter().zip(&other.values) {
            acc = acc + a.conj() * b;
        }
        Ok(acc.scale(self.grid.dx()))
    }

    /// Pointwise |f_i|^2.
    pub fn density(&self) -> Vec<T> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Rescale so that `norm` becomes `target`.
    pub fn renormalize(&mut self, target: T) {
        let n = self.norm();
        if n > T::zero() {
            let s = (target / n).sqrt();
            for v in &mut self.values {
                *v = v.scale(s);
            }
        }
    }

    /// Spectral second derivative. One-off convenience; propagation code
    /// holds a [`Spectral`] with cached plans instead.
    pub fn second_derivative(&self) -> Self {
        Spectral::new(self.grid.clone()).second_derivative(self)
    }

    /// Norm fraction sitting in the outermost nodes (5% of the grid, split
    /// between both ends). Large values mean the box is too small.
    pub fn edge_mass_fraction(&self) -> T {
        let n = self.grid.n_points();
        let side = ((n as f64 * EDGE_NODE_FRACTION / 2.0).ceil() as usize).max(1);
        let total = self
            .values
            .iter()
            .fold(T::zero(), |acc, v| acc + v.norm_sqr());
        if total == T::zero() {
            return T::zero();
        }
        let mut edge = T::zero();
        for v in self.values.iter().take(side) {
            edge = edge + v.norm_sqr();
        }
        for v in self.values.iter().skip(n - side) {
            edge = edge + v.norm_sqr();
        }
        edge / total
    }

    /// Spectral-power fraction in the top 10% of |k|. Large values mean dx
    /// is too coarse for the field.
    pub fn spectral_tail_fraction(&self) -> T {
        let spectral = Spectral::new(self.grid.clone());
        let mut buf = self.values.clone();
        spectral.forward(&mut buf);
        let cutoff = self.grid.k_max() * T::of(1.0 - TAIL_K_FRACTION);
        let mut total = T::zero();
        let mut tail = T::zero();
        for (v, &k) in buf.iter().zip(self.grid.ks()) {
            let p = v.norm_sqr();
            total = total + p;
            if k.abs() >= cutoff {
                tail = tail + p;
            }
        }
        if total == T::zero() {
            T::zero()
        } else {
            tail / total
        }
    }

    /// Check both monitors against `threshold` (pass `None` for the default
    /// 1e-8) and fail with a diagnostic error on a trip.
    pub fn check_monitors(&self, threshold: Option<T>) -> Result<()> {
        let thr = threshold.unwrap_or_else(|| T::of(MONITOR_THRESHOLD));
        let edge = self.edge_mass_fraction();
        if edge > thr {
            return Err(Error::EdgeMass {
                fraction: edge.to_f64_lossy(),
                threshold: thr.to_f64_lossy(),
            });
        }
        let tail = self.spectral_tail_fraction();
        if tail > thr {
            return Err(Error::SpectralTail {
                fraction: tail.to_f64_lossy(),
                threshold: thr.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// CSV dump with columns x, re, im. Metadata lines go first, prefixed
    /// with '#'.
    pub fn write_csv<W: Write>(&self, w: &mut W, metadata: &[(&str, String)]) -> Result<()> {
        for (key, val) in metadata {
            writeln!(w, "# {key} = {val}")?;
        }
        writeln!(w, "x,re,im")?;
        for (&x, v) in self.grid.xs().iter().zip(&self.values) {
            writeln!(w, "{},{},{}", x, v.re, v.im)?;
        }
        Ok(())
    }
}
