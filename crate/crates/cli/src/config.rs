//! Flat TOML run configuration plus command-line overrides.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tg_sta::{AnsatzKind, Ramp64, Trap64};

/// Everything a run needs; presets ship one file per scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    pub n: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default = "one")]
    pub omega0_sq: f64,
    #[serde(default = "ten")]
    pub omegaf_sq: f64,

    /// Single ramp duration (ground/ramps/densities/evolve/converge).
    #[serde(default)]
    pub t_f: Option<f64>,
    /// Logarithmic t_f sweep (fig2/fig4): min, max, point count.
    #[serde(default)]
    pub t_f_min: Option<f64>,
    #[serde(default)]
    pub t_f_max: Option<f64>,
    #[serde(default)]
    pub t_f_count: Option<usize>,
    /// Explicit durations (fig5).
    #[serde(default)]
    pub t_f_list: Vec<f64>,

    /// Particle-number sweep (fig5).
    #[serde(default)]
    pub n_min: Option<f64>,
    #[serde(default)]
    pub n_max: Option<f64>,
    #[serde(default)]
    pub n_step: Option<f64>,

    /// Ramp selectors: "sta-ermakov", "sta-tf", "sta-gaussian", "ref".
    #[serde(default)]
    pub ramps: Vec<String>,

    #[serde(default = "default_x_min")]
    pub x_min: f64,
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    #[serde(default = "default_n_points")]
    pub n_points: usize,

    /// Time-step override; absent means the built-in policy.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn one() -> f64 {
    1.0
}
fn ten() -> f64 {
    10.0
}
fn default_x_min() -> f64 {
    -24.0
}
fn default_x_max() -> f64 {
    24.0
}
fn default_n_points() -> usize {
    2048
}

/// Errors that must map to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig =
            toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n <= 0.0 {
            return Err(ConfigError(format!("n must be positive, got {}", self.n)));
        }
        if self.gamma < 0.0 {
            return Err(ConfigError(format!(
                "gamma must be non-negative, got {}",
                self.gamma
            )));
        }
        if self.omega0_sq <= 0.0 || self.omegaf_sq <= 0.0 {
            return Err(ConfigError(
                "omega0_sq and omegaf_sq must be positive".into(),
            ));
        }
        if self.x_min >= self.x_max {
            return Err(ConfigError(format!(
                "grid extent [{}, {}] is empty",
                self.x_min, self.x_max
            )));
        }
        if !self.n_points.is_power_of_two() || self.n_points < 8 {
            return Err(ConfigError(format!(
                "n_points must be a power of two >= 8, got {}",
                self.n_points
            )));
        }
        if let Some(dt) = self.dt {
            if dt <= 0.0 {
                return Err(ConfigError(format!("dt must be positive, got {dt}")));
            }
        }
        if let Some(t_f) = self.t_f {
            if t_f <= 0.0 {
                return Err(ConfigError(format!("t_f must be positive, got {t_f}")));
            }
        }
        let mut sorted = self.t_f_list.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if sorted.windows(2).any(|w| w[0] >= w[1]) || self.t_f_list.iter().any(|&t| t <= 0.0) {
            return Err(ConfigError(
                "t_f_list must be positive and strictly increasing".into(),
            ));
        }
        for name in &self.ramps {
            parse_ramp_name(name)?;
        }
        Ok(())
    }

    /// t_f sweep: explicit list wins, otherwise the logarithmic grid.
    pub fn t_f_grid(&self) -> Result<Vec<f64>, ConfigError> {
        if !self.t_f_list.is_empty() {
            return Ok(self.t_f_list.clone());
        }
        match (self.t_f_min, self.t_f_max, self.t_f_count) {
            (Some(lo), Some(hi), Some(count)) => {
                if lo <= 0.0 || hi <= lo || count < 2 {
                    return Err(ConfigError(format!(
                        "bad t_f grid: min {lo}, max {hi}, count {count}"
                    )));
                }
                Ok((0..count)
                    .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
                    .collect())
            }
            _ => Err(ConfigError(
                "need t_f_list or t_f_min/t_f_max/t_f_count".into(),
            )),
        }
    }

    pub fn n_grid(&self) -> Result<Vec<f64>, ConfigError> {
        match (self.n_min, self.n_max, self.n_step) {
            (Some(lo), Some(hi), Some(step)) => {
                if lo <= 0.0 || hi < lo || step <= 0.0 {
                    return Err(ConfigError(format!(
                        "bad n grid: min {lo}, max {hi}, step {step}"
                    )));
                }
                let mut out = Vec::new();
                let mut v = lo;
                while v <= hi + 1e-9 {
                    out.push(v);
                    v += step;
                }
                Ok(out)
            }
            _ => Err(ConfigError("need n_min/n_max/n_step".into())),
        }
    }

    pub fn trap(&self, t_f: f64) -> Result<Trap64, ConfigError> {
        Trap64::new(self.omega0_sq, self.omegaf_sq, self.gamma, t_f)
            .map_err(|e| ConfigError(e.to_string()))
    }
}

/// A ramp selector: the schedule kind plus, for variational ramps, the ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RampName {
    Ermakov,
    VariationalTf,
    VariationalGaussian,
    Reference,
}

impl RampName {
    pub fn label(self) -> &'static str {
        match self {
            RampName::Ermakov => "sta-ermakov",
            RampName::VariationalTf => "sta-tf",
            RampName::VariationalGaussian => "sta-gaussian",
            RampName::Reference => "ref",
        }
    }

    pub fn ansatz(self) -> Option<AnsatzKind> {
        match self {
            RampName::VariationalTf | RampName::Reference => Some(AnsatzKind::ThomasFermi),
            RampName::VariationalGaussian => Some(AnsatzKind::Gaussian),
            RampName::Ermakov => None,
        }
    }

    /// Build the schedule; the reference ramp picks its harmonic or
    /// anharmonic form from gamma.
    pub fn schedule(self, trap: Trap64, n: f64) -> tg_sta::Result<Ramp64> {
        match self {
            RampName::Ermakov => Ramp64::ermakov(trap),
            RampName::VariationalTf => Ramp64::variational(trap, AnsatzKind::ThomasFermi, n),
            RampName::VariationalGaussian => Ramp64::variational(trap, AnsatzKind::Gaussian, n),
            RampName::Reference => {
                if trap.gamma == 0.0 {
                    Ramp64::reference(trap)
                } else {
                    Ramp64::reference_anharmonic(trap, AnsatzKind::ThomasFermi, n)
                }
            }
        }
    }
}

pub fn parse_ramp_name(name: &str) -> Result<RampName, ConfigError> {
    match name {
        "sta-ermakov" => Ok(RampName::Ermakov),
        "sta-tf" => Ok(RampName::VariationalTf),
        "sta-gaussian" => Ok(RampName::VariationalGaussian),
        "ref" => Ok(RampName::Reference),
        other => Err(ConfigError(format!(
            "unknown ramp \"{other}\" (expected sta-ermakov, sta-tf, sta-gaussian, or ref)"
        ))),
    }
}

pub fn ramp_names(cfg: &RunConfig) -> Result<Vec<RampName>, ConfigError> {
    if cfg.ramps.is_empty() {
        return Err(ConfigError("config lists no ramps".into()));
    }
    cfg.ramps.iter().map(|s| parse_ramp_name(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        toml::from_str(
            r#"
            scenario = "evolve"
            n = 10.0
            t_f = 1.0
            ramps = ["sta-ermakov"]
            "#,
        )
        .unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = base();
        cfg.validate().unwrap();
        assert_eq!(cfg.omega0_sq, 1.0);
        assert_eq!(cfg.omegaf_sq, 10.0);
        assert_eq!(cfg.n_points, 2048);
        assert_eq!(cfg.gamma, 0.0);
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = base();
        cfg.n = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = base();
        cfg.n_points = 1000;
        assert!(cfg.validate().is_err());
        let mut cfg = base();
        cfg.ramps = vec!["bogus".into()];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn log_grid_is_increasing() {
        let mut cfg = base();
        cfg.t_f_min = Some(0.1);
        cfg.t_f_max = Some(10.0);
        cfg.t_f_count = Some(25);
        let grid = cfg.t_f_grid().unwrap();
        assert_eq!(grid.len(), 25);
        assert!((grid[0] - 0.1).abs() < 1e-12);
        assert!((grid[24] - 10.0).abs() < 1e-12);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn n_grid_steps() {
        let mut cfg = base();
        cfg.n_min = Some(2.0);
        cfg.n_max = Some(30.0);
        cfg.n_step = Some(2.0);
        assert_eq!(cfg.n_grid().unwrap().len(), 15);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = toml::from_str::<RunConfig>("scenario = \"x\"\nn = 1.0\nwhatever = 3\n");
        assert!(err.is_err());
    }
}
