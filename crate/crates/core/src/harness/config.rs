//! TOML experiment configuration.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::fields::AField;
use super::inputs::InputFamily;
use crate::error::{CzError, Result};
use crate::grid::GridSpec;
use crate::kernels::{KernelSpec, MollifyMethod};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub d: usize,
    pub n: usize,
    /// Physical side length; defaults to `n` (unit cells).
    #[serde(default)]
    pub side: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { d: 2, n: 64, side: None }
    }
}

/// Per-claim sweep overrides; each claim reads the fields it understands.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimParams {
    pub n_values: Option<Vec<u32>>,
    pub eps_values: Option<Vec<f64>>,
    pub d_values: Option<Vec<usize>>,
    pub j: Option<i32>,
    pub gamma: Option<f64>,
    pub grid_n: Option<usize>,
    pub probes: Option<usize>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid: GridConfig,
    /// Registered kernel id, e.g. `riesz-x1`.
    #[serde(default = "default_kernel")]
    pub kernel: String,
    #[serde(default)]
    pub a_field: AField,
    #[serde(default)]
    pub input: InputFamily,
    #[serde(default = "default_m_s")]
    pub m_s: usize,
    /// Truncation radius of the full operator.
    #[serde(default = "default_r")]
    pub r: f64,
    /// Decomposition level; defaults to `||f||_1 / |torus|` times 4.
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default = "default_dilate")]
    pub dilate: u32,
    #[serde(default)]
    pub mollify: MollifyMethod,
    /// Dyadic scale and smoothing parameters for `apply-dyadic` / `apply-sector`.
    #[serde(default = "default_j")]
    pub j: i32,
    #[serde(default)]
    pub n: Option<u32>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub direction: Option<Vec<f64>>,
    /// Claims `run_experiment` verifies; empty means none.
    #[serde(default)]
    pub claims: Vec<String>,
    #[serde(default)]
    pub claim: BTreeMap<String, ClaimParams>,
}

fn default_kernel() -> String {
    "riesz-x1".into()
}
fn default_m_s() -> usize {
    crate::commutator::DEFAULT_M_S
}
fn default_r() -> f64 {
    1.0
}
fn default_dilate() -> u32 {
    2
}
fn default_j() -> i32 {
    2
}
fn default_gamma() -> f64 {
    0.5
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

fn config_err(path: &str, msg: impl Into<String>) -> CzError {
    CzError::Config { path: path.to_string(), msg: msg.into() }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::new(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_err(if path.is_empty() { "." } else { &path }, e.into_inner().message().trim().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CzError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.grid.d) {
            return Err(config_err("grid.d", format!("must be 2 or 3, got {}", self.grid.d)));
        }
        if self.grid.n < 8 || !self.grid.n.is_power_of_two() {
            return Err(config_err("grid.n", format!("must be a power of two >= 8, got {}", self.grid.n)));
        }
        if let Some(s) = self.grid.side {
            if !(s > 0.0) {
                return Err(config_err("grid.side", format!("must be positive, got {s}")));
            }
        }
        KernelSpec::from_id(&self.kernel, self.grid.d).map_err(|e| config_err("kernel", e.to_string()))?;
        if self.m_s < 16 {
            return Err(config_err("m_s", format!("must be at least 16, got {}", self.m_s)));
        }
        if !(self.r > 0.0) {
            return Err(config_err("r", format!("must be positive, got {}", self.r)));
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0) {
                return Err(config_err("lambda", format!("must be positive, got {l}")));
            }
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(config_err("gamma", format!("must lie in (0, 1), got {}", self.gamma)));
        }
        if let Some(dir) = &self.direction {
            if dir.len() != self.grid.d {
                return Err(config_err("direction", format!("needs {} components", self.grid.d)));
            }
        }
        for id in self.claim.keys() {
            if !super::claims::registered_ids().contains(&id.as_str()) {
                return Err(config_err(&format!("claim.{id}"), "no such claim is registered"));
            }
        }
        for (i, id) in self.claims.iter().enumerate() {
            if !super::claims::registered_ids().contains(&id.as_str()) {
                return Err(config_err(&format!("claims[{i}]"), format!("unknown claim {id}")));
            }
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.d, self.grid.n, self.grid.side.unwrap_or(self.grid.n as f64))
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        KernelSpec::from_id(&self.kernel, self.grid.d)
    }

    pub fn claim_params(&self, id: &str) -> ClaimParams {
        self.claim.get(id).cloned().unwrap_or_default()
    }

    /// SHA-256 of the canonical JSON form of the configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("configuration serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
