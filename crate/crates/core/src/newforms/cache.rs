//! On-disk cache: one JSON file per level, `<dir>/level_<M>.json`.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{NewformError, NewformRecord, Source};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CacheFile {
    schema_version: u32,
    level: u64,
    records: Vec<NewformRecord>,
}

pub fn path_for(dir: &Path, level: u64) -> PathBuf {
    dir.join(format!("level_{level}.json"))
}

/// Cached records, or `None` when there is no usable file. A file that fails to parse or
/// has the wrong schema is renamed to `level_<M>.json.corrupt-<t>` and treated as absent.
pub fn read(dir: &Path, level: u64) -> Result<Option<Vec<NewformRecord>>, NewformError> {
    let path = path_for(dir, level);
    let raw = match fs::read_to_string(&path) {
        Ok(raw) => raw,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(NewformError::Io(format!("{}: {e}", path.display()))),
    };
    match serde_json::from_str::<CacheFile>(&raw) {
        Ok(f) if f.schema_version == SCHEMA_VERSION && f.level == level => Ok(Some(
            f.records.into_iter().map(|r| NewformRecord { source: Source::Cache, ..r }).collect(),
        )),
        _ => {
            quarantine(&path)?;
            Ok(None)
        }
    }
}

fn quarantine(path: &Path) -> Result<(), NewformError> {
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
    let mut target = path.as_os_str().to_owned();
    target.push(format!(".corrupt-{stamp}"));
    fs::rename(path, &target).map_err(|e| NewformError::Io(format!("quarantine {}: {e}", path.display())))
}

/// Write atomically: a temporary file in the same directory, then rename over the target.
pub fn write(dir: &Path, level: u64, records: &[NewformRecord]) -> Result<(), NewformError> {
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    fs::create_dir_all(dir).map_err(|e| NewformError::Io(format!("{}: {e}", dir.display())))?;
    let file = CacheFile {
        schema_version: SCHEMA_VERSION,
        level,
        records: records.iter().map(|r| NewformRecord { source: Source::Online, ..r.clone() }).collect(),
    };
    let body = serde_json::to_string_pretty(&file).expect("records serialize");
    let tmp = dir.join(format!(
        ".level_{level}.json.tmp-{}-{}",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    fs::write(&tmp, body).map_err(|e| NewformError::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path_for(dir, level)).map_err(|e| NewformError::Io(format!("rename {}: {e}", tmp.display())))
}
