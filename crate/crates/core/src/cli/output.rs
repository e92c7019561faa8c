//! Result tables and their CSV / JSON-lines renderings.

use serde_json::{Map, Value};

use super::config::Format;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Results payload without metadata.
    pub fn payload(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
                w.write_record(&self.columns).map_err(io)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
                Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
            }
            Format::Json => {
                let mut out = String::new();
                for row in &self.rows {
                    let obj: Map<String, Value> =
                        self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                    out.push_str(&Value::Object(obj).to_string());
                    out.push('\n');
                }
                Ok(out)
            }
        }
    }
}

/// Full document: metadata block followed by the payload. CSV metadata
/// lines start with `#`; JSON-lines metadata is a first object under `meta`.
pub fn render(meta: &[(String, String)], table: &Table, format: Format) -> Result<String> {
    let payload = table.payload(format)?;
    let mut out = String::new();
    match format {
        Format::Csv => {
            for (k, v) in meta {
                out.push_str(&format!("# {k}: {v}\n"));
            }
        }
        Format::Json => {
            let obj: Map<String, Value> = meta.iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect();
            let mut wrap = Map::new();
            wrap.insert("meta".into(), Value::Object(obj));
            out.push_str(&Value::Object(wrap).to_string());
            out.push('\n');
        }
    }
    out.push_str(&payload);
    Ok(out)
}

/// Strips the metadata block from a rendered document.
pub fn strip_metadata(doc: &str, format: Format) -> String {
    match format {
        Format::Csv => doc.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect(),
        Format::Json => doc.lines().skip(1).map(|l| format!("{l}\n")).collect(),
    }
}
