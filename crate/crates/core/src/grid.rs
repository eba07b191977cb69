//! Uniform 1D spatial grid with FFT-ordered angular wavenumbers.
//!
//! The grid is periodic by construction; open-system fields are legal on it
//! as long as they decay before the edges (see the monitors on
//! [`crate::field::ComplexField`]).

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct SpatialGrid<T: Real> {
    x_min: T,
    x_max: T,
    n_points: usize,
    dx: T,
    xs: Vec<T>,
    ks: Vec<T>,
}

impl<T: Real> SpatialGrid<T> {
    /// Build a grid on `[x_min, x_max)` with `n_points` nodes.
    ///
    /// `n_points` must be a power of two, at least 8.
    pub fn new(x_min: T, x_max: T, n_points: usize) -> Result<Self> {
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(Error::GridSize(n_points));
        }
        if x_min >= x_max {
            return Err(Error::GridExtent {
                x_min: x_min.to_f64_lossy(),
                x_max: x_max.to_f64_lossy(),
            });
        }
        let n_t = T::of(n_points as f64);
        let dx = (x_max - x_min) / n_t;
        let xs: Vec<T> = (0..n_points)
            .map(|i| x_min + T::of(i as f64) * dx)
            .collect();
        // FFT ordering: k_i = 2 pi i / L for i < n/2, negative branch after.
        let two_pi_over_l = T::of(2.0) * T::PI() / (x_max - x_min);
        let ks: Vec<T> = (0..n_points)
            .map(|i| {
                let m = if i < n_points / 2 {
                    i as f64
                } else {
                    i as f64 - n_points as f64
                };
                two_pi_over_l * T::of(m)
            })
            .collect();
        Ok(Self {
            x_min,
            x_max,
            n_points,
            dx,
            xs,
            ks,
        })
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    /// Node positions x_i = x_min + i dx.
    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    /// Angular wavenumbers in FFT ordering, k in [-pi/dx, pi/dx).
    pub fn ks(&self) -> &[T] {
        &self.ks
    }

    pub fn k_max(&self) -> T {
        T::PI() / self.dx
    }

    /// Largest |x| reachable on the grid, used by time-step policies.
    pub fn x_edge(&self) -> T {
        self.x_min.abs().max(self.x_max.abs())
    }
}

impl<T: Real> PartialEq for SpatialGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.x_min == other.x_min && self.x_max == other.x_max && self.n_points == other.n_points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_arithmetic() {
        let g = SpatialGrid::<f64>::new(-16.0, 16.0, 512).unwrap();
        assert_eq!(g.dx(), 0.0625);
        assert!((g.k_max() - std::f64::consts::PI / 0.0625).abs() < 1e-12);
        assert_eq!(g.xs()[0], -16.0);
        assert_eq!(g.n_points(), 512);
    }

    #[test]
    fn small_grid_nodes() {
        let g = SpatialGrid::<f64>::new(-1.0, 1.0, 8).unwrap();
        let expect = [-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75];
        for (a, b) in g.xs().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(
            SpatialGrid::<f64>::new(0.0, 1.0, 7),
            Err(Error::GridSize(7))
        ));
        assert!(SpatialGrid::<f64>::new(0.0, 1.0, 4).is_err());
        assert!(SpatialGrid::<f64>::new(1.0, 1.0, 16).is_err());
        assert!(SpatialGrid::<f64>::new(2.0, 1.0, 16).is_err());
    }

    #[test]
    fn wavenumber_range() {
        let g = SpatialGrid::<f64>::new(-8.0, 8.0, 64).unwrap();
        let kmax = g.k_max();
        for &k in g.ks() {
            assert!(k >= -kmax && k < kmax);
        }
        // k ordering: 0, dk, ..., then negative branch
        assert_eq!(g.ks()[0], 0.0);
        assert!(g.ks()[32] < 0.0);
    }
}
