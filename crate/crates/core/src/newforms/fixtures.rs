//! Newform data bundled into the binary for offline use.

use std::path::Path;

use super::{normalize::normalize, NewformError, NewformRecord, Source};

macro_rules! embedded {
    ($($level:literal),* $(,)?) => {
        &[$(($level, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/newforms/level_", stringify!($level), ".json")))),*]
    };
}

static EMBEDDED: &[(u64, &str)] = embedded![
    1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 16, 25, 27, 32, 37, 43, 49, 53, 61, 64, 67, 73, 74, 79, 81, 83, 89,
    97, 101, 103, 107, 109, 113, 121, 125, 127, 128, 131, 243, 343,
];

/// Provenance of the bundled files (generator, method and date).
pub const MANIFEST: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/newforms/manifest.json"));

pub fn embedded_levels() -> Vec<u64> {
    EMBEDDED.iter().map(|(l, _)| *l).collect()
}

fn parse(level: u64, raw: &str) -> Result<Vec<NewformRecord>, NewformError> {
    let value: serde_json::Value =
        serde_json::from_str(raw).map_err(|e| NewformError::parse(None, format!("fixture for level {level}: {e}")))?;
    normalize(level, &value, Source::Fixture)
}

/// Records for `level` from `dir/level_<M>.json` if `dir` is given, else from the embedded set.
pub fn load(level: u64, dir: Option<&Path>) -> Result<Option<Vec<NewformRecord>>, NewformError> {
    if let Some(dir) = dir {
        let path = dir.join(format!("level_{level}.json"));
        return match std::fs::read_to_string(&path) {
            Ok(raw) => parse(level, &raw).map(Some),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(NewformError::Io(format!("{}: {e}", path.display()))),
        };
    }
    match EMBEDDED.iter().find(|(l, _)| *l == level) {
        Some((_, raw)) => parse(level, raw).map(Some),
        None => Ok(None),
    }
}
