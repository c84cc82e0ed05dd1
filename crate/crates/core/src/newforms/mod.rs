//! Weight-2 newform records (level, functional-equation sign, analytic rank) from an
//! external database, with an on-disk cache and bundled offline fixtures.

pub mod cache;
pub mod config;
pub mod fixtures;
pub mod normalize;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::divisors_u128;
use crate::geometry::newspace_dim;
pub use config::{Config, NewformConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NewformError {
    #[error("transient network failure: {0}")]
    Transient(String),
    #[error("HTTP status {status}")]
    Http { status: u16 },
    #[error("malformed payload{}: {message}", index.map(|i| format!(" at record {i}")).unwrap_or_default())]
    Parse { index: Option<usize>, message: String },
    #[error("I/O: {0}")]
    Io(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("no cached or bundled data for level {level}")]
    Unavailable { level: u64 },
}

impl NewformError {
    pub fn parse(index: Option<usize>, message: impl Into<String>) -> Self {
        Self::Parse { index, message: message.into() }
    }

    pub fn is_transient(&self) -> bool {
        matches!(self, Self::Transient(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Online,
    Cache,
    Fixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Online,
    Offline,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewformRecord {
    pub level: u64,
    pub label: String,
    pub weight: u32,
    /// Root number of `L(f, s)`, i.e. minus the `w_M` eigenvalue.
    pub fricke_sign: i8,
    pub analytic_rank: Option<u32>,
    /// Size of the Galois orbit.
    pub dim: Option<u32>,
    pub source: Source,
}

impl NewformRecord {
    /// Root number -1 with analytic rank exactly 1, so `L'(f, 1) ≠ 0`.
    pub fn is_minus_rank_one(&self) -> bool {
        self.fricke_sign == -1 && self.analytic_rank == Some(1)
    }
}

/// Everything known about one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelSnapshot {
    pub level: u64,
    /// Orbit dimensions are all present and add up to `dim S_2^new(Γ0(M))`.
    pub complete: bool,
    pub records: Vec<NewformRecord>,
}

impl LevelSnapshot {
    pub fn new(level: u64, records: Vec<NewformRecord>) -> Self {
        let total: Option<u64> = records.iter().map(|r| r.dim.map(u64::from)).sum();
        let complete = match (total, newspace_dim(level)) {
            (Some(t), Ok(d)) => t == d,
            _ => false,
        };
        Self { level, complete, records }
    }
}

/// Anything that can answer "which newforms live at level M".
pub trait NewformSource: Send + Sync {
    fn fetch(&self, level: u64) -> Result<LevelSnapshot, NewformError>;

    /// Levels above this are not queried.
    fn max_level(&self) -> u64 {
        u64::MAX
    }
}

/// Serialises callers so that consecutive requests are at least `interval` apart.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    next: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn new(interval: Duration) -> Self {
        Self { interval, next: Mutex::new(None) }
    }

    pub fn acquire(&self) {
        let wait = {
            let mut next = self.next.lock().expect("limiter lock");
            let now = Instant::now();
            let slot = next.map_or(now, |n| n.max(now));
            *next = Some(slot + self.interval);
            slot - now
        };
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }
}

type Slot = Arc<Mutex<Option<LevelSnapshot>>>;

/// HTTP/cache/fixture client. Safe to share between threads; concurrent requests for the
/// same level wait for the first one and reuse its answer.
pub struct NewformClient {
    cfg: NewformConfig,
    mode: Mode,
    limiter: RateLimiter,
    http: OnceLock<Result<reqwest::blocking::Client, String>>,
    slots: Mutex<HashMap<u64, Slot>>,
}

impl NewformClient {
    pub fn new(cfg: NewformConfig, mode: Mode) -> Self {
        let limiter = RateLimiter::new(cfg.min_interval());
        Self { cfg, mode, limiter, http: OnceLock::new(), slots: Mutex::new(HashMap::new()) }
    }

    /// Offline client over the embedded fixtures and the default cache directory.
    pub fn offline() -> Self {
        Self::new(NewformConfig::default(), Mode::Offline)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn config(&self) -> &NewformConfig {
        &self.cfg
    }

    /// Records at `level`, sorted by label.
    pub fn fetch_newforms(&self, level: u64) -> Result<LevelSnapshot, NewformError> {
        if level == 0 {
            return Err(NewformError::Config("level must be positive".into()));
        }
        let slot = self.slots.lock().expect("slot map").entry(level).or_default().clone();
        let mut guard = slot.lock().expect("level slot");
        if let Some(snap) = guard.as_ref() {
            return Ok(snap.clone());
        }
        let records = match self.mode {
            Mode::Online => self.fetch_online(level)?,
            Mode::Offline => self.fetch_offline(level)?,
        };
        let snap = LevelSnapshot::new(level, records);
        *guard = Some(snap.clone());
        Ok(snap)
    }

    fn fetch_offline(&self, level: u64) -> Result<Vec<NewformRecord>, NewformError> {
        if let Some(recs) = cache::read(&self.cfg.cache_dir, level)? {
            return Ok(recs);
        }
        fixtures::load(level, self.cfg.fixtures_dir.as_deref())?.ok_or(NewformError::Unavailable { level })
    }

    fn client(&self) -> Result<&reqwest::blocking::Client, NewformError> {
        self.http
            .get_or_init(|| {
                reqwest::blocking::Client::builder()
                    .timeout(self.cfg.timeout())
                    .build()
                    .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| NewformError::Transient(e.clone()))
    }

    fn fetch_online(&self, level: u64) -> Result<Vec<NewformRecord>, NewformError> {
        let mut url = reqwest::Url::parse(&self.cfg.base_url).map_err(|e| NewformError::Config(format!("base_url: {e}")))?;
        url.query_pairs_mut()
            .append_pair("level", &level.to_string())
            .append_pair("weight", "2")
            .append_pair("char_orbit_index", "1")
            .append_pair("_format", "json")
            .append_pair("_fields", "label,level,weight,char_orbit_index,dim,fricke_eigenval,analytic_rank");
        let client = self.client()?;
        self.limiter.acquire();
        let resp = client.get(url).send().map_err(|e| NewformError::Transient(e.to_string()))?;
        let status = resp.status();
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(NewformError::Transient(format!("HTTP status {}", status.as_u16())));
        }
        if !status.is_success() {
            return Err(NewformError::Http { status: status.as_u16() });
        }
        let body = resp.text().map_err(|e| NewformError::Transient(e.to_string()))?;
        let value: serde_json::Value = serde_json::from_str(&body).map_err(|e| NewformError::parse(None, e.to_string()))?;
        let records = normalize::normalize(level, &value, Source::Online)?;
        cache::write(&self.cfg.cache_dir, level, &records)?;
        Ok(records)
    }
}

impl NewformSource for NewformClient {
    fn fetch(&self, level: u64) -> Result<LevelSnapshot, NewformError> {
        self.fetch_newforms(level)
    }

    fn max_level(&self) -> u64 {
        self.cfg.max_level
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub level: u64,
    pub record: NewformRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndeterminateLevel {
    /// Kept as text since divisors of large `N` exceed 64 bits.
    pub level: String,
    pub reason: String,
}

/// Result of scanning the divisors of `N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessScan {
    pub witness: Option<Witness>,
    /// Divisors scanned before the witness whose data was missing or incomplete.
    pub indeterminate: Vec<IndeterminateLevel>,
}

impl WitnessScan {
    /// No witness, and no level left undecided.
    pub fn is_definitely_none(&self) -> bool {
        self.witness.is_none() && self.indeterminate.is_empty()
    }
}

/// First divisor `M | N` (in increasing order) carrying a newform with root number -1 and
/// analytic rank 1.
pub fn witness_minus_rank1(n: u128, source: &dyn NewformSource) -> WitnessScan {
    let mut indeterminate = Vec::new();
    for m in divisors_u128(n) {
        let level = match u64::try_from(m) {
            Ok(l) if l <= source.max_level() => l,
            _ => {
                indeterminate.push(IndeterminateLevel { level: m.to_string(), reason: "above the query limit".into() });
                continue;
            }
        };
        match source.fetch(level) {
            Ok(snap) => {
                if let Some(rec) = snap.records.iter().find(|r| r.is_minus_rank_one()) {
                    return WitnessScan { witness: Some(Witness { level, record: rec.clone() }), indeterminate };
                }
                if !snap.complete {
                    indeterminate.push(IndeterminateLevel { level: m.to_string(), reason: "incomplete data".into() });
                }
            }
            Err(e) => indeterminate.push(IndeterminateLevel { level: m.to_string(), reason: e.to_string() }),
        }
    }
    WitnessScan { witness: None, indeterminate }
}
