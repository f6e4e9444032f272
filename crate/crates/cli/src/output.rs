//! Rendering of command results.
//!
//! Every command builds one `serde_json::Value` object. Machine format
//! serializes it as a single JSON object; text format walks the same tree
//! and prints `key = value` lines. Both run every float through the same
//! 17-significant-digit scientific formatter, so the two formats show
//! byte-identical numbers and parse back to the exact binary value.
//! Infinities are represented as the strings "inf" / "-inf" since JSON has
//! no literal for them.

use std::io::{self, Write};

use serde_json::ser::Formatter;
use serde_json::{Map, Value};

/// Wraps a float for output, mapping infinities to strings.
pub fn fnum(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

/// Rows of a matrix as a JSON array of arrays.
pub fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| fnum(m[(r, c)])).collect()))
            .collect(),
    )
}

/// Ordered key-value builder; JSON objects from `serde_json` sort keys,
/// which is fine for machine output, but text output follows insertion
/// order, so the builder keeps both.
#[derive(Default)]
pub struct Report {
    entries: Vec<(String, Value)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, key: &str, value: Value) -> &mut Self {
        self.entries.push((key.to_string(), value));
        self
    }

    pub fn float(&mut self, key: &str, x: f64) -> &mut Self {
        self.push(key, fnum(x))
    }

    pub fn int(&mut self, key: &str, x: i64) -> &mut Self {
        self.push(key, Value::from(x))
    }

    pub fn uint(&mut self, key: &str, x: usize) -> &mut Self {
        self.push(key, Value::from(x as u64))
    }

    pub fn boolean(&mut self, key: &str, x: bool) -> &mut Self {
        self.push(key, Value::Bool(x))
    }

    pub fn text(&mut self, key: &str, s: &str) -> &mut Self {
        self.push(key, Value::String(s.to_string()))
    }

    fn to_value(&self) -> Value {
        let mut map = Map::new();
        for (k, v) in &self.entries {
            map.insert(k.clone(), v.clone());
        }
        Value::Object(map)
    }

    pub fn render(&self, machine: bool) -> String {
        if machine {
            let mut buf = Vec::new();
            let mut ser =
                serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
            serde::Serialize::serialize(&self.to_value(), &mut ser)
                .expect("in-memory serialization");
            let mut s = String::from_utf8(buf).expect("JSON is UTF-8");
            s.push('\n');
            s
        } else {
            let mut out = String::new();
            for (k, v) in &self.entries {
                render_text(k, v, &mut out);
            }
            out
        }
    }
}

/// Serializes any serde value with the scientific float formatter.
pub fn to_json_string<T: serde::Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value.serialize(&mut ser).expect("in-memory serialization");
    let mut s = String::from_utf8(buf).expect("JSON is UTF-8");
    s.push('\n');
    s
}

/// The one float formatter both output modes share.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn render_text(key: &str, value: &Value, out: &mut String) {
    match value {
        Value::Array(items) => {
            // A matrix (array of arrays) prints one row per line; other
            // arrays index element-wise.
            if items.iter().all(|i| i.is_array()) && !items.is_empty() {
                for (r, row) in items.iter().enumerate() {
                    render_text(&format!("{key}[{r}]"), row, out);
                }
            } else if items.iter().all(|i| !i.is_object()) {
                let joined: Vec<String> = items.iter().map(scalar_text).collect();
                out.push_str(&format!("{key} = {}\n", joined.join(" ")));
            } else {
                for (r, item) in items.iter().enumerate() {
                    render_text(&format!("{key}[{r}]"), item, out);
                }
            }
        }
        Value::Object(map) => {
            for (k, v) in map {
                render_text(&format!("{key}.{k}"), v, out);
            }
        }
        other => {
            out.push_str(&format!("{key} = {}\n", scalar_text(other)));
        }
    }
}

fn scalar_text(value: &Value) -> String {
    match value {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.to_string()
            } else if let Some(u) = n.as_u64() {
                u.to_string()
            } else {
                fmt_float(n.as_f64().unwrap_or(f64::NAN))
            }
        }
        Value::Bool(b) => b.to_string(),
        Value::String(s) => s.clone(),
        Value::Null => "null".to_string(),
        other => format!("{other}"),
    }
}

/// `serde_json` formatter printing every f64 with 17 significant digits in
/// scientific notation — enough for exact binary roundtrip, and identical
/// to the text renderer's floats.
#[derive(Clone, Copy, Default)]
pub struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}
