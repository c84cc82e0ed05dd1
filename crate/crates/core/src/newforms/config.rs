use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use super::NewformError;

pub const DEFAULT_BASE_URL: &str = "https://www.lmfdb.org/api/mf_newforms/";

/// Settings for the newform client. Read from the `[newforms]` table of a TOML file, then
/// overridden by `NEWFORMS_BASE_URL`, `NEWFORMS_CACHE_DIR` and `NEWFORMS_TIMEOUT_MS`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewformConfig {
    pub base_url: String,
    pub cache_dir: PathBuf,
    pub timeout_ms: u64,
    pub requests_per_second: f64,
    /// Directory of `level_<M>.json` files used instead of the embedded fixtures.
    pub fixtures_dir: Option<PathBuf>,
    /// Divisors above this level are not queried and count as indeterminate.
    pub max_level: u64,
}

impl Default for NewformConfig {
    fn default() -> Self {
        Self {
            base_url: DEFAULT_BASE_URL.to_string(),
            cache_dir: PathBuf::from("cache/newforms"),
            timeout_ms: 10_000,
            requests_per_second: 2.0,
            fixtures_dir: None,
            max_level: 100_000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub enumeration_bound: Option<u64>,
}

/// Whole configuration file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub newforms: NewformConfig,
    pub geometry: GeometryConfig,
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Self, NewformError> {
        toml::from_str(s).map_err(|e| NewformError::Config(e.to_string()))
    }

    pub fn load(path: Option<&Path>) -> Result<Self, NewformError> {
        let mut cfg = match path {
            Some(p) => {
                let raw = std::fs::read_to_string(p).map_err(|e| NewformError::Config(format!("{}: {e}", p.display())))?;
                Self::from_toml_str(&raw)?
            }
            None => Self::default(),
        };
        cfg.newforms.apply_env(|k| std::env::var(k).ok())?;
        Ok(cfg)
    }
}

impl NewformConfig {
    /// Apply environment overrides through a lookup function.
    pub fn apply_env(&mut self, get: impl Fn(&str) -> Option<String>) -> Result<(), NewformError> {
        if let Some(v) = get("NEWFORMS_BASE_URL") {
            self.base_url = v;
        }
        if let Some(v) = get("NEWFORMS_CACHE_DIR") {
            self.cache_dir = PathBuf::from(v);
        }
        if let Some(v) = get("NEWFORMS_TIMEOUT_MS") {
            self.timeout_ms = v
                .trim()
                .parse()
                .map_err(|_| NewformError::Config(format!("NEWFORMS_TIMEOUT_MS={v:?} is not an integer")))?;
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms)
    }

    pub fn min_interval(&self) -> Duration {
        if self.requests_per_second <= 0.0 {
            Duration::ZERO
        } else {
            Duration::from_secs_f64(1.0 / self.requests_per_second)
        }
    }
}
