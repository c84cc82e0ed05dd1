//! The single place that knows the database's field names.

use serde_json::Value;

use super::{NewformError, NewformRecord, Source};

/// Turn a payload (a bare array, or an object with a `data` array) into records for
/// `level`, sorted by label. Records for nontrivial characters are skipped.
///
/// The database's `fricke_eigenval` is the eigenvalue of `w_M`; the stored sign is the
/// root number `-w_M`.
pub fn normalize(level: u64, payload: &Value, source: Source) -> Result<Vec<NewformRecord>, NewformError> {
    let rows = match payload {
        Value::Array(rows) => rows,
        Value::Object(obj) => match obj.get("data") {
            Some(Value::Array(rows)) => rows,
            _ => return Err(NewformError::parse(None, "object payload without a `data` array")),
        },
        _ => return Err(NewformError::parse(None, "payload is neither an array nor an object")),
    };
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let obj = row.as_object().ok_or_else(|| NewformError::parse(Some(i), "record is not an object"))?;
        let int = |key: &str| -> Result<Option<i64>, NewformError> {
            match obj.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(v) => v
                    .as_i64()
                    .map(Some)
                    .ok_or_else(|| NewformError::parse(Some(i), format!("`{key}` is not an integer"))),
            }
        };
        if int("char_orbit_index")?.unwrap_or(1) != 1 {
            continue;
        }
        let label = obj
            .get("label")
            .and_then(Value::as_str)
            .ok_or_else(|| NewformError::parse(Some(i), "missing `label`"))?
            .to_string();
        let rec_level = int("level")?.ok_or_else(|| NewformError::parse(Some(i), "missing `level`"))?;
        if rec_level != level as i64 {
            return Err(NewformError::parse(Some(i), format!("level {rec_level} in a response for level {level}")));
        }
        let weight = int("weight")?.ok_or_else(|| NewformError::parse(Some(i), "missing `weight`"))?;
        if weight != 2 {
            return Err(NewformError::parse(Some(i), format!("weight {weight}, expected 2")));
        }
        let fricke_eigenval = int("fricke_eigenval")?.ok_or_else(|| NewformError::parse(Some(i), "missing `fricke_eigenval`"))?;
        if fricke_eigenval.abs() != 1 {
            return Err(NewformError::parse(Some(i), format!("fricke_eigenval {fricke_eigenval} is not ±1")));
        }
        let fricke_sign = -fricke_eigenval as i8;
        let analytic_rank = match int("analytic_rank")? {
            Some(r) if r < 0 => return Err(NewformError::parse(Some(i), "negative `analytic_rank`")),
            Some(r) => Some(r as u32),
            None => None,
        };
        if let Some(r) = analytic_rank {
            if (r % 2 == 1) != (fricke_sign == -1) {
                return Err(NewformError::parse(
                    Some(i),
                    format!("analytic rank {r} contradicts functional-equation sign {fricke_sign}"),
                ));
            }
        }
        let dim = match int("dim")? {
            Some(d) if d <= 0 => return Err(NewformError::parse(Some(i), "nonpositive `dim`")),
            d => d.map(|d| d as u32),
        };
        out.push(NewformRecord { level, label, weight: 2, fricke_sign, analytic_rank, dim, source });
    }
    out.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(out)
}
