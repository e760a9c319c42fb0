//! Canonical JSON encoding.
//!
//! Object keys are sorted, arrays keep their order, floats use the shortest
//! representation that round-trips.

use serde::Serialize;
use serde_json::{Map, Value};

/// Compact canonical bytes.
pub fn to_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, serde_json::Error> {
    let v = canonicalize(serde_json::to_value(value)?);
    serde_json::to_vec(&v)
}

/// Indented canonical bytes with a trailing newline, used for files people edit.
pub fn to_pretty_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, serde_json::Error> {
    let v = canonicalize(serde_json::to_value(value)?);
    let mut out = serde_json::to_vec_pretty(&v)?;
    out.push(b'\n');
    Ok(out)
}

/// Recursively sorts object keys. Independent of whether serde_json was built
/// with `preserve_order`.
pub fn canonicalize(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut sorted = Map::with_capacity(entries.len());
            for (k, v) in entries {
                sorted.insert(k, canonicalize(v));
            }
            Value::Object(sorted)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        other => other,
    }
}
