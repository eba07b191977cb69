use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 8")]
    GridSize(usize),

    #[error("grid extent is empty: x_min = {x_min} >= x_max = {x_max}")]
    GridExtent { x_min: f64, x_max: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field contains non-finite values")]
    NonFinite,

    #[error("orbital sets have different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("edge mass fraction {fraction:.3e} exceeds threshold {threshold:.3e} (field leaking out of the box)")]
    EdgeMass { fraction: f64, threshold: f64 },

    #[error("spectral tail fraction {fraction:.3e} exceeds threshold {threshold:.3e} (grid under-resolves the field)")]
    SpectralTail { fraction: f64, threshold: f64 },

    #[error("{what} did not converge after {steps} steps")]
    NonConvergence { what: &'static str, steps: usize },

    #[error("no positive boundary scaling root at the {endpoint} endpoint (F + pi^2 K / 3 = {constant:.3e} <= 0)")]
    NoBoundaryRoot {
        endpoint: &'static str,
        constant: f64,
    },

    #[error("density has zero total weight")]
    ZeroDensity,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
