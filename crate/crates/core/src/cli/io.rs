//! Matrix files: the JSON schema `{"rows", "cols", "entries": [[re, im], ...]}`
//! (row-major) and Matrix Market `array complex general` (column-major).

use std::fmt;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::complexmat::{c64, Matrix};
use crate::report::{canonical_json, to_value, MatrixJson};

const MM_HEADER: &str = "%%MatrixMarket matrix array complex general";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixFormat {
    Json,
    MatrixMarketArray,
}

impl MatrixFormat {
    /// Matrix Market for `.mtx`/`.mm`, JSON otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("mtx") || e.eq_ignore_ascii_case("mm") => {
                MatrixFormat::MatrixMarketArray
            }
            _ => MatrixFormat::Json,
        }
    }

    /// Matrix Market iff the text starts with the `%%MatrixMarket` banner.
    pub fn sniff(text: &str) -> Self {
        if text.trim_start().starts_with("%%MatrixMarket") {
            MatrixFormat::MatrixMarketArray
        } else {
            MatrixFormat::Json
        }
    }
}

/// Malformed or unreadable matrix input. `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseError {
    pub path: Option<String>,
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl ParseError {
    fn new(message: impl Into<String>) -> Self {
        Self {
            path: None,
            line: None,
            field: None,
            message: message.into(),
        }
    }

    fn at_line(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }

    fn at_field(mut self, field: impl Into<String>) -> Self {
        self.field = Some(field.into());
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.path {
            write!(f, "{p}: ")?;
        }
        if let Some(l) = self.line {
            write!(f, "line {l}: ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "{field}: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ParseError {}

/// A parsed matrix and the raw bytes it came from.
#[derive(Debug, Clone)]
pub struct MatrixInput {
    pub matrix: Matrix,
    pub format: MatrixFormat,
    pub bytes: Vec<u8>,
}

pub fn read_matrix(path: &Path) -> Result<MatrixInput, ParseError> {
    let with_path = |mut e: ParseError| {
        e.path = Some(path.display().to_string());
        e
    };
    let bytes = std::fs::read(path).map_err(|e| with_path(ParseError::new(e.to_string())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| with_path(ParseError::new(format!("not UTF-8: {e}"))))?;
    let format = MatrixFormat::sniff(text);
    let matrix = parse_matrix(text, format).map_err(with_path)?;
    Ok(MatrixInput {
        matrix,
        format,
        bytes,
    })
}

pub fn parse_matrix(text: &str, format: MatrixFormat) -> Result<Matrix, ParseError> {
    match format {
        MatrixFormat::Json => parse_json(text),
        MatrixFormat::MatrixMarketArray => parse_matrix_market(text),
    }
}

pub fn parse_json(text: &str) -> Result<Matrix, ParseError> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| ParseError::new(e.to_string()).at_line(e.line()))?;
    matrix_from_value(&v)
}

/// Reads a matrix from an already-parsed JSON value in the matrix schema.
pub fn matrix_from_value(v: &Value) -> Result<Matrix, ParseError> {
    let obj = v
        .as_object()
        .ok_or_else(|| ParseError::new("expected a JSON object"))?;
    let dim = |key: &str| -> Result<usize, ParseError> {
        obj.get(key)
            .and_then(Value::as_u64)
            .map(|x| x as usize)
            .ok_or_else(|| ParseError::new("expected a non-negative integer").at_field(key))
    };
    let rows = dim("rows")?;
    let cols = dim("cols")?;
    let entries = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| ParseError::new("expected an array of [re, im] pairs").at_field("entries"))?;
    if Some(entries.len()) != rows.checked_mul(cols) {
        return Err(ParseError::new(format!(
            "{} entries for a {rows}x{cols} matrix",
            entries.len()
        ))
        .at_field("entries"));
    }
    let mut data = Vec::with_capacity(entries.len());
    for (k, e) in entries.iter().enumerate() {
        let pair = e.as_array().filter(|p| p.len() == 2);
        let parts = pair.and_then(|p| Some((p[0].as_f64()?, p[1].as_f64()?)));
        let (re, im) = parts
            .ok_or_else(|| ParseError::new("expected [re, im]").at_field(format!("entries[{k}]")))?;
        data.push(c64(re, im));
    }
    Matrix::new(rows, cols, data).map_err(|e| ParseError::new(e.to_string()).at_field("entries"))
}

pub fn parse_matrix_market(text: &str) -> Result<Matrix, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, banner) = lines
        .next()
        .ok_or_else(|| ParseError::new("empty file").at_line(1))?;
    let tokens: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    let expected: Vec<String> = MM_HEADER.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens != expected {
        return Err(ParseError::new(format!("expected header `{MM_HEADER}`")).at_line(1));
    }
    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_line, size) = body
        .next()
        .ok_or_else(|| ParseError::new("missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(ParseError::new("size line must be `rows cols`").at_line(size_line));
    }
    let parse_dim = |s: &str, name: &str| {
        s.parse::<usize>()
            .map_err(|_| ParseError::new(format!("bad dimension `{s}`")).at_line(size_line).at_field(name))
    };
    let rows = parse_dim(dims[0], "rows")?;
    let cols = parse_dim(dims[1], "cols")?;

    let total = rows * cols;
    let mut m = Matrix::zeros(rows, cols);
    let mut k = 0;
    for (line, l) in body {
        if k == total {
            return Err(ParseError::new("more entries than rows*cols").at_line(line));
        }
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(ParseError::new("expected `re im`").at_line(line));
        }
        let num = |i: usize, name: &str| -> Result<f64, ParseError> {
            let x: f64 = fields[i].parse().map_err(|_| {
                ParseError::new(format!("bad number `{}`", fields[i])).at_line(line).at_field(name)
            })?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(ParseError::new("non-finite value").at_line(line).at_field(name))
            }
        };
        let (re, im) = (num(0, "re")?, num(1, "im")?);
        m[(k % rows, k / rows)] = c64(re, im);
        k += 1;
    }
    if k != total {
        return Err(ParseError::new(format!("{k} entries for a {rows}x{cols} matrix")));
    }
    Ok(m)
}

pub fn to_json_string(m: &Matrix) -> String {
    canonical_json(&to_value(MatrixJson(m)))
}

pub fn to_matrix_market_string(m: &Matrix) -> String {
    let mut out = format!("{MM_HEADER}\n{} {}\n", m.rows(), m.cols());
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            let z = m[(i, j)];
            out.push_str(&format!("{:.16e} {:.16e}\n", z.re, z.im));
        }
    }
    out
}

pub fn render(m: &Matrix, format: MatrixFormat) -> String {
    match format {
        MatrixFormat::Json => to_json_string(m),
        MatrixFormat::MatrixMarketArray => to_matrix_market_string(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Matrix {
        Matrix::from_fn(2, 3, |i, j| c64(i as f64 + 0.1, j as f64 - 1.0 / 3.0))
    }

    #[test]
    fn json_round_trip_is_exact() {
        let m = sample();
        assert_eq!(parse_json(&to_json_string(&m)).unwrap(), m);
    }

    #[test]
    fn matrix_market_round_trip_is_exact() {
        let m = sample();
        let text = to_matrix_market_string(&m);
        assert_eq!(MatrixFormat::sniff(&text), MatrixFormat::MatrixMarketArray);
        assert_eq!(parse_matrix_market(&text).unwrap(), m);
    }

    #[test]
    fn matrix_market_is_column_major() {
        let text = "%%MatrixMarket matrix array complex general\n% comment\n2 2\n1 0\n2 0\n3 0\n4 0\n";
        let m = parse_matrix_market(text).unwrap();
        assert_eq!(m, Matrix::from_real_rows(&[[1.0, 3.0], [2.0, 4.0]]));
    }

    #[test]
    fn json_errors_carry_positions() {
        let e = parse_json("{\"rows\": 2,\n \"cols\": 2,\n \"entries\": [[1,0]]}").unwrap_err();
        assert_eq!(e.field.as_deref(), Some("entries"));
        let e = parse_json("{\"rows\": 1, \"cols\": 2, \"entries\": [[1,0],[1]]}").unwrap_err();
        assert_eq!(e.field.as_deref(), Some("entries[1]"));
        let e = parse_json("{\"rows\": 1,\n\n \"cols\": }").unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = parse_json("{\"rows\": -1, \"cols\": 1, \"entries\": []}").unwrap_err();
        assert_eq!(e.field.as_deref(), Some("rows"));
    }

    #[test]
    fn matrix_market_errors_carry_positions() {
        let e = parse_matrix_market("%%MatrixMarket matrix coordinate real general\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        let text = "%%MatrixMarket matrix array complex general\n1 2\n1 0\n1 x\n";
        let e = parse_matrix_market(text).unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (Some(4), Some("im")));
        let text = "%%MatrixMarket matrix array complex general\n1 2\n1 0\n";
        assert!(parse_matrix_market(text).is_err());
        let text = "%%MatrixMarket matrix array complex general\n1 1\n1 0\n2 0\n";
        assert_eq!(parse_matrix_market(text).unwrap_err().line, Some(4));
    }
}
