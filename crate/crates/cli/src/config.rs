use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::suites::SUITE_IDS;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Self::Json),
            "text" => Ok(Self::Text),
            other => Err(ConfigError(format!("unknown format {other:?}, expected json or text"))),
        }
    }
}

/// Tolerance overrides; unset entries keep the built-in defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance of inequality checks.
    pub rel: Option<f64>,
    /// Relative tolerance of exact identities.
    pub exact: Option<f64>,
    /// Relative agreement of analytic and finite-difference Levi forms.
    pub fd: Option<f64>,
    /// Finite-difference step.
    pub fd_step: Option<f64>,
}

/// Sampling parameters of the catalog-driven suites.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogParams {
    pub interior: Option<usize>,
    pub boundary: Option<usize>,
    /// Length of null certificates.
    pub certificate_length: Option<usize>,
    /// Accuracy of approximate common ranges.
    pub eps: Option<f64>,
    /// Truncation dimension of the maximality families.
    pub truncation: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub catalog: CatalogParams,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_dims() -> Vec<usize> {
    vec![2, 4, 8, 16]
}

fn default_trials() -> usize {
    50
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suites: Vec::new(),
            dims: default_dims(),
            trials: default_trials(),
            seed: 0,
            tolerances: Tolerances::default(),
            catalog: CatalogParams::default(),
            output: None,
            format: Format::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Expands `all` and checks every documented constraint.
    pub fn validate(&mut self) -> Result<(), ConfigError> {
        if self.suites.iter().any(|s| s == "all") {
            self.suites = SUITE_IDS.iter().map(|s| s.to_string()).collect();
        }
        if self.suites.is_empty() {
            return Err(ConfigError("no suites selected, nothing to run".into()));
        }
        for s in &self.suites {
            if !SUITE_IDS.contains(&s.as_str()) {
                return Err(ConfigError(format!("unknown suite {s:?}; known: {}", SUITE_IDS.join(", "))));
            }
        }
        self.suites.sort();
        self.suites.dedup();
        if self.dims.is_empty() {
            return Err(ConfigError("dims must not be empty".into()));
        }
        if let Some(d) = self.dims.iter().find(|&&d| !(1..=64).contains(&d)) {
            return Err(ConfigError(format!("dimension {d} outside [1, 64]")));
        }
        if self.trials == 0 {
            return Err(ConfigError("trials must be at least 1".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [("rel", t.rel), ("exact", t.exact), ("fd", t.fd), ("fd_step", t.fd_step), ("eps", self.catalog.eps)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(ConfigError(format!("{name} must be a positive number, got {v}")));
                }
            }
        }
        let c = &self.catalog;
        for (name, v) in [("interior", c.interior), ("boundary", c.boundary), ("certificate_length", c.certificate_length)] {
            if v == Some(0) {
                return Err(ConfigError(format!("{name} must be at least 1")));
            }
        }
        if let Some(n) = c.truncation {
            if !(2..=64).contains(&n) {
                return Err(ConfigError(format!("truncation {n} outside [2, 64]")));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, output location excluded.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.output = None;
        let bytes = serde_json::to_vec(&canon).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

/// Parses a comma-separated list of dimensions.
pub fn parse_dims(s: &str) -> Result<Vec<usize>, ConfigError> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| ConfigError(format!("bad dimension {t:?}"))))
        .collect()
}
