//! Shortcut-to-adiabaticity design and verification for a strongly
//! interacting 1D Bose gas in the Tonks-Girardeau limit.
//!
//! The library designs trap-frequency ramps omega^2(t) from the quintic
//! mean-field description of the gas (exact Ermakov shortcut for harmonic
//! traps, variational shortcut for anharmonic ones) and verifies them by
//! propagating both the mean-field equation and the N-orbital
//! representation, reporting density overlap and many-body fidelity.
//!
//! All core math is generic over the scalar type through [`Real`];
//! concrete `f64` aliases are exported below. Units are scaled throughout:
//! hbar = m = omega_0 = 1, lengths in a0 = sqrt(hbar / (m omega_0)), times
//! in 1/omega_0. Trap strengths are always stored as omega^2.

pub mod ansatz;
pub mod dynamics;
mod eigen;
pub mod error;
pub mod field;
pub mod grid;
pub mod metrics;
pub mod quad;
pub mod ramp;
pub mod scalar;
pub mod spectral;

pub use ansatz::{
    gaussian_integrals, tf_chemical_potential, tf_integrals, tf_integrals_quadrature, tf_radius,
    AnsatzIntegrals, AnsatzKind,
};
pub use dynamics::{
    energy_mf, energy_orbitals, evolve_mf, evolve_mf_observed, evolve_orbitals,
    evolve_orbitals_observed, ground_orbitals, ground_state_mf, recommended_dt, trap_potential,
    MeanFieldState, OrbitalSet,
};
pub use error::{Error, Result};
pub use field::ComplexField;
pub use grid::SpatialGrid;
pub use metrics::{
    density_mf, density_overlap, density_tg, many_body_fidelity, overlap_matrix, tf_density,
    DensityProfile, OverlapMatrix,
};
pub use ramp::{boundary_b, eq_variational, RampKind, RampSchedule, ScalingPoly, TrapSpec};
pub use scalar::Real;
pub use spectral::Spectral;

/// Concrete `f64` instantiations.
pub type Grid64 = SpatialGrid<f64>;
pub type Field64 = ComplexField<f64>;
pub type Trap64 = TrapSpec<f64>;
pub type Ramp64 = RampSchedule<f64>;
pub type Integrals64 = AnsatzIntegrals<f64>;
pub type MeanField64 = MeanFieldState<f64>;
pub type Orbitals64 = OrbitalSet<f64>;
pub type Density64 = DensityProfile<f64>;
