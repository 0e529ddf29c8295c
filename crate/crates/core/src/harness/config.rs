use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::operators::FlowParams;
use crate::sim::InitFamily;

/// Environment override for the output directory.
pub const ENV_OUTPUT_DIR: &str = "COUETTE_OUTPUT_DIR";
/// Environment override for the worker count.
pub const ENV_JOBS: &str = "COUETTE_JOBS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    GridCheck,
    Elliptic,
    Resolvent,
    Gap,
    Accretivity,
    Semigroup,
    Decay,
    Spacetime,
    Simulate,
    Threshold,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::GridCheck => "grid_check",
            Experiment::Elliptic => "elliptic",
            Experiment::Resolvent => "resolvent",
            Experiment::Gap => "gap",
            Experiment::Accretivity => "accretivity",
            Experiment::Semigroup => "semigroup",
            Experiment::Decay => "decay",
            Experiment::Spacetime => "spacetime",
            Experiment::Simulate => "simulate",
            Experiment::Threshold => "threshold",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(name.to_string())).map_err(|_| Error::Config(format!("unknown experiment '{name}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Nu,
    B,
    R,
    K,
    Epsilon,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Nu => "nu",
            SweepVariable::B => "b",
            SweepVariable::R => "r",
            SweepVariable::K => "k",
            SweepVariable::Epsilon => "epsilon",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
}

/// Per-experiment knobs; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Options {
    /// Azimuthal mode for single-mode experiments.
    pub k: i64,
    /// Modes for the elliptic and accretivity checks.
    pub k_list: Vec<i64>,
    pub trials: usize,
    pub lambda_steps: usize,
    pub t_grid: Vec<f64>,
    /// Decay horizon in units of `1/Ψ`.
    pub horizon_psi: f64,
    pub decay_steps: usize,
    /// Amplitude for `simulate`; for `threshold`, the initial bracket.
    pub epsilon: f64,
    pub eps_range: (f64, f64),
    pub eps0: f64,
    pub eps1: f64,
    pub stability_factor: f64,
    pub c_prime: Option<f64>,
    pub horizon: Option<f64>,
    pub dt: Option<f64>,
    pub init: InitFamily,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            k: 1,
            k_list: vec![1, 2, 4, 8, 16],
            trials: 200,
            lambda_steps: 64,
            t_grid: vec![0.5, 1.0, 5.0, 10.0, 50.0],
            horizon_psi: 5.0,
            decay_steps: 2000,
            epsilon: 0.0,
            eps_range: (1.0, 1e3),
            eps0: 0.01,
            eps1: 0.01,
            stability_factor: 4.0,
            c_prime: None,
            horizon: None,
            dt: None,
            init: InitFamily::default(),
        }
    }
}

/// One complete, reproducible experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: FlowParams,
    pub grid: GridSpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub options: Options,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// Desk-scale defaults for an experiment: `ν = 1e-3`, `B = 1`, `R = 2`, `K = 8`, `n = 64`.
    pub fn default_for(experiment: Experiment) -> Self {
        let n = if matches!(experiment, Experiment::Simulate | Experiment::Threshold) {
            48
        } else {
            64
        };
        Self {
            params: FlowParams {
                nu: 1e-3,
                a: 0.0,
                b: 1.0,
                aspect: 2.0,
                g_scale: 1.0,
                k_max: 8,
            },
            grid: GridSpec { n },
            sweep: None,
            experiment,
            seed: 0,
            output_dir: default_output_dir(),
            tolerances: BTreeMap::new(),
            options: Options::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies the documented environment overrides.
    pub fn apply_env(&mut self) {
        if let Ok(dir) = std::env::var(ENV_OUTPUT_DIR) {
            if !dir.is_empty() {
                self.output_dir = PathBuf::from(dir);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.grid.n < 8 {
            return Err(Error::Config(format!("grid needs n >= 8, got {}", self.grid.n)));
        }
        if let Some(s) = &self.sweep {
            for &v in &s.values {
                let ok = match s.variable {
                    SweepVariable::Nu => v > 0.0,
                    SweepVariable::R => v > 1.0,
                    SweepVariable::K => v >= 1.0 && v.fract() == 0.0,
                    SweepVariable::Epsilon => v >= 0.0,
                    SweepVariable::B => v.is_finite(),
                };
                if !ok || !v.is_finite() {
                    return Err(Error::Config(format!("invalid {} sweep value {v}", s.variable.name())));
                }
            }
        }
        Ok(())
    }

    /// Tolerance override or the given default.
    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_value(self).expect("config serializes");
        let text = serde_json::to_string(&canonical).expect("value serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Configuration of one sweep point.
    pub fn at(&self, value: f64) -> Self {
        let mut c = self.clone();
        c.sweep = None;
        if let Some(s) = &self.sweep {
            match s.variable {
                SweepVariable::Nu => c.params.nu = value,
                SweepVariable::B => c.params.b = value,
                SweepVariable::R => c.params.aspect = value,
                SweepVariable::K => c.options.k = value as i64,
                SweepVariable::Epsilon => c.options.epsilon = value,
            }
        }
        c
    }

    /// Sweep points, or the single base point when there is no sweep.
    pub fn points(&self) -> Vec<Option<f64>> {
        match &self.sweep {
            Some(s) => s.values.iter().map(|&v| Some(v)).collect(),
            None => vec![None],
        }
    }
}
