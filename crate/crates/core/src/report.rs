//! Serialization helpers and the deterministic JSON report format.
//!
//! Reports are written with sorted object keys and every floating-point value
//! printed with 17 significant digits, so identical inputs give byte-identical
//! output and every double survives a round trip.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::complexmat::{Matrix, Scalar};

pub fn ser_scalar<S: Serializer>(z: &Scalar, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub fn ser_scalars<S: Serializer>(zs: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(zs.len()))?;
    for z in zs {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

pub fn ser_matrix<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
    MatrixJson(m).serialize(s)
}

pub fn ser_matrices<S: Serializer>(ms: &[Matrix], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(ms.len()))?;
    for m in ms {
        seq.serialize_element(&MatrixJson(m))?;
    }
    seq.end()
}

/// Borrowing adapter that serializes a matrix in the `{rows, cols, entries}` schema.
pub struct MatrixJson<'a>(pub &'a Matrix);

impl Serialize for MatrixJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Matrix", 3)?;
        st.serialize_field("rows", &self.0.rows())?;
        st.serialize_field("cols", &self.0.cols())?;
        let entries: Vec<[f64; 2]> = self.0.entries().iter().map(|z| [z.re, z.im]).collect();
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

/// Machine-readable result of one command.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    /// SHA-256 of the raw input bytes, hex encoded; empty when there is no input file.
    pub input_digest: String,
    pub parameters: BTreeMap<String, Value>,
    pub results: Value,
    pub residuals: BTreeMap<String, f64>,
    pub verdict: Option<String>,
}

impl Report {
    pub fn new(command: &str, input_digest: String) -> Self {
        Self {
            command: command.to_string(),
            input_digest,
            parameters: BTreeMap::new(),
            results: Value::Null,
            residuals: BTreeMap::new(),
            verdict: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.to_string(), to_value(value));
        self
    }

    pub fn to_json(&self) -> String {
        canonical_json(&to_value(self))
    }
}

/// `serde_json::to_value` for types whose serialization cannot fail.
pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

pub fn digest(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

/// Pretty-printed JSON with sorted keys and 17-significant-digit floats.
/// Non-finite floats become `null`.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                out.push_str(&n.to_string());
            } else {
                out.push_str(&format_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // Short numeric arrays such as [re, im] stay on one line.
            if items.len() <= 2 && items.iter().all(Value::is_number) {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, item, depth);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(out, depth + 1);
                write_value(out, item, depth + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                indent(out, depth + 1);
                let _ = write!(out, "{}: ", Value::String((*k).clone()));
                write_value(out, &map[*k], depth + 1);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(out, depth);
            out.push('}');
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}
