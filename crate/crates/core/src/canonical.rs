//! Canonical JSON encoding shared by every persisted document.
//!
//! Object keys are sorted lexicographically at every depth, output is
//! pretty-printed with two-space indentation and terminated by a single
//! newline. Re-encoding a decoded canonical document is byte-identical.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

/// Schema version written into every document this crate produces.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    /// The document is malformed or does not match the schema.
    #[error("parse error at {path} (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    /// `field` names the version field that did not match.
    #[error("unsupported {field} {found} (supported: {supported})")]
    Version {
        field: &'static str,
        found: i64,
        supported: u32,
    },
}

impl DocumentError {
    pub(crate) fn at_field(path: &str, message: impl Into<String>) -> Self {
        DocumentError::Parse {
            path: path.to_string(),
            line: 0,
            column: 0,
            message: message.into(),
        }
    }
}

fn sort_keys(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = serde_json::Map::new();
            for (k, v) in entries {
                out.insert(k, sort_keys(v));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

/// Converts any serializable value into its canonical JSON tree.
pub fn to_value<T: Serialize>(value: &T) -> Value {
    sort_keys(serde_json::to_value(value).expect("document types always serialize"))
}

/// Canonical byte encoding.
pub fn to_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&to_value(value)).expect("values always serialize");
    out.push(b'\n');
    out
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    String::from_utf8(to_bytes(value)).expect("serde_json emits UTF-8")
}

/// Decodes a versioned document.
///
/// `schema_version` is checked before the body so that documents from a
/// newer schema fail with [`DocumentError::Version`] rather than with an
/// unknown-field error.
pub fn from_versioned_bytes<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, DocumentError> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| DocumentError::Parse {
        path: ".".to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    match value.get("schema_version") {
        None => {
            return Err(DocumentError::at_field(
                "schema_version",
                "missing field `schema_version`",
            ))
        }
        Some(v) => match v.as_i64() {
            Some(found) if found == SCHEMA_VERSION as i64 => {}
            Some(found) => {
                return Err(DocumentError::Version {
                    field: "schema_version",
                    found,
                    supported: SCHEMA_VERSION,
                })
            }
            None => {
                return Err(DocumentError::at_field(
                    "schema_version",
                    "schema_version must be an integer",
                ))
            }
        },
    }
    // Deserialize from the text again so error positions refer to the input.
    let mut de = serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        DocumentError::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: format!("{inner} (schema_version {SCHEMA_VERSION})"),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Serialize, Deserialize, PartialEq)]
    #[serde(deny_unknown_fields)]
    struct Doc {
        schema_version: u32,
        zeta: u8,
        alpha: Vec<u8>,
    }

    #[test]
    fn keys_are_sorted() {
        let doc = Doc {
            schema_version: 1,
            zeta: 3,
            alpha: vec![1],
        };
        let text = to_string(&doc);
        let a = text.find("alpha").unwrap();
        let s = text.find("schema_version").unwrap();
        let z = text.find("zeta").unwrap();
        assert!(a < s && s < z);
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn version_checked_first() {
        let err = from_versioned_bytes::<Doc>(br#"{"schema_version": 999, "bogus": 1}"#).unwrap_err();
        assert!(matches!(err, DocumentError::Version { found: 999, .. }));
    }

    #[test]
    fn unknown_field_names_the_field() {
        let err =
            from_versioned_bytes::<Doc>(br#"{"schema_version": 1, "zeta": 1, "alpha": [], "extra": 2}"#).unwrap_err();
        match err {
            DocumentError::Parse { message, .. } => assert!(message.contains("extra")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncated_input_is_a_parse_error() {
        let err = from_versioned_bytes::<Doc>(br#"{"schema_version": 1, "zeta""#).unwrap_err();
        assert!(matches!(err, DocumentError::Parse { .. }));
    }
}
