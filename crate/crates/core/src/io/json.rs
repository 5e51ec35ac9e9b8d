use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use super::{IoError, FORMAT_VERSION};

/// A type that can be written inside the versioned JSON envelope
/// `{"data": .., "format_version": 1, "kind": ..}`.
pub trait JsonDocument: Serialize + DeserializeOwned {
    const KIND: &'static str;

    /// Rejects values that must not be written or accepted.
    fn check(&self) -> Result<(), IoError>;
}

/// Pretty-printed envelope with sorted keys and a trailing newline.
pub fn to_json_string<T: JsonDocument>(doc: &T) -> Result<String, IoError> {
    doc.check()?;
    let data = serde_json::to_value(doc).map_err(|e| IoError::Invalid(e.to_string()))?;
    let mut envelope = Map::new();
    envelope.insert("data".into(), data);
    envelope.insert("format_version".into(), Value::from(FORMAT_VERSION));
    envelope.insert("kind".into(), Value::from(T::KIND));
    // serde_json's default map is a BTreeMap, so keys serialise in order
    let mut text = serde_json::to_string_pretty(&Value::Object(envelope))
        .map_err(|e| IoError::Invalid(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn write_json<T: JsonDocument, W: Write>(doc: &T, mut out: W) -> Result<(), IoError> {
    out.write_all(to_json_string(doc)?.as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn from_json_str<T: JsonDocument>(text: &str) -> Result<T, IoError> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        let message = if looks_non_finite(text) {
            format!("NaN and infinities are not valid numbers here ({e})")
        } else {
            e.to_string()
        };
        IoError::ParseError {
            line: e.line(),
            column: e.column(),
            message,
        }
    })?;
    let Value::Object(mut envelope) = value else {
        return Err(IoError::Invalid("top level must be an object".into()));
    };
    match envelope.get("format_version").and_then(Value::as_u64) {
        Some(v) if v == FORMAT_VERSION as u64 => {}
        Some(v) => return Err(IoError::UnsupportedVersion(v)),
        None => return Err(IoError::Invalid("missing format_version".into())),
    }
    let kind = envelope.get("kind").and_then(Value::as_str).unwrap_or("");
    if kind != T::KIND {
        return Err(IoError::WrongKind {
            expected: T::KIND.into(),
            found: kind.into(),
        });
    }
    let data = envelope
        .remove("data")
        .ok_or_else(|| IoError::Invalid("missing data".into()))?;
    let doc: T = serde_json::from_value(data).map_err(|e| IoError::Invalid(e.to_string()))?;
    doc.check()?;
    Ok(doc)
}

pub fn read_json<T: JsonDocument, R: Read>(mut input: R) -> Result<T, IoError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    from_json_str(&text)
}

fn looks_non_finite(text: &str) -> bool {
    text.contains("NaN") || text.contains("Infinity")
}
