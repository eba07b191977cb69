//! Cached FFT plans and spectral derivatives on a fixed grid.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::field::ComplexField;
use crate::grid::SpatialGrid;
use crate::scalar::Real;

pub struct Spectral<T: Real> {
    grid: Arc<SpatialGrid<T>>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Spectral<T> {
    pub fn new(grid: Arc<SpatialGrid<T>>) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n_points());
        let inverse = planner.plan_fft_inverse(grid.n_points());
        Self {
            grid,
            forward,
            inverse,
        }
    }

    pub fn grid(&self) -> &Arc<SpatialGrid<T>> {
        &self.grid
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&self, buf: &mut [Complex<T>]) {
        self.forward.process(buf);
    }

    /// Inverse transform including the 1/n normalization, in place.
    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        self.inverse.process(buf);
        let scale = T::one() / T::of(self.grid.n_points() as f64);
        for v in buf.iter_mut() {
            *v = v.scale(scale);
        }
    }

    /// Scratch length required by the scratch-based transforms.
    pub fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }

    /// Allocation-free forward transform for hot loops.
    pub fn forward_with_scratch(&self, buf: &mut [Complex<T>], scratch: &mut [Complex<T>]) {
        self.forward.process_with_scratch(buf, scratch);
    }

    /// Allocation-free inverse transform (1/n normalized) for hot loops.
    pub fn inverse_with_scratch(&self, buf: &mut [Complex<T>], scratch: &mut [Complex<T>]) {
        self.inverse.process_with_scratch(buf, scratch);
        let scale = T::one() / T::of(self.grid.n_points() as f64);
        for v in buf.iter_mut() {
            *v = v.scale(scale);
        }
    }

    /// Spectral second derivative: inverse FFT of (-k^2) FFT(f).
    pub fn second_derivative(&self, f: &ComplexField<T>) -> ComplexField<T> {
        let mut buf = f.values().to_vec();
        self.forward(&mut buf);
        for (v, &k) in buf.iter_mut().zip(self.grid.ks()) {
            *v = v.scale(-k * k);
        }
        self.inverse(&mut buf);
        ComplexField::from_values_unchecked(self.grid.clone(), buf)
    }
}
