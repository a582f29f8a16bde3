//! Tabular and JSON report writers with provenance stamps.
//!
//! CSV files open with a `# ` comment line naming the tool version and the
//! SHA-256 of the effective configuration; JSON reports carry the same
//! data in a `provenance` object. Nothing time-dependent is written, so
//! identical inputs give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TOOL: &str = "stylodrift";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
}

impl Provenance {
    pub fn for_config(config_text: &str) -> Self {
        Provenance {
            tool: TOOL,
            version: VERSION,
            config_sha256: hex::encode(Sha256::digest(config_text.as_bytes())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(v) if v.is_finite() => v.to_string(),
            Cell::Num(v) if v.is_nan() => "NA".into(),
            Cell::Num(v) => if *v > 0.0 { "Inf" } else { "-Inf" }.into(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => json!(s),
            Cell::Int(i) => json!(i),
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) | Cell::Empty => Value::Null,
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        // Drop the sign of -0.0.
        Cell::Num(if v == 0.0 { 0.0 } else { v })
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// A named table with a fixed column list.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `# ` lines written after the provenance line.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn to_csv(&self, prov: &Provenance) -> Result<String> {
        let mut out = format!("# {} {} config_sha256={}\n", prov.tool, prov.version, prov.config_sha256);
        for n in &self.notes {
            out.push_str(&format!("# {n}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let write_err = |e: csv::Error| Error::Invariant(format!("csv encoding failed: {e}"));
        w.write_record(&self.columns).map_err(write_err)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).map_err(write_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invariant(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Invariant(e.to_string()))?);
        Ok(out)
    }

    pub fn to_json(&self, prov: &Provenance) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    m.insert(c.clone(), v.to_json());
                }
                Value::Object(m)
            })
            .collect();
        json!({
            "provenance": prov,
            "table": self.name,
            "notes": self.notes,
            "columns": self.columns,
            "rows": rows,
        })
    }

    /// Write `<dir>/<name>.csv` or `<dir>/<name>.json`.
    pub fn write(&self, dir: &Path, format: Format, prov: &Provenance) -> Result<PathBuf> {
        match format {
            Format::Csv => {
                let path = dir.join(format!("{}.csv", self.name));
                write_text(&path, &self.to_csv(prov)?)?;
                Ok(path)
            }
            Format::Json => {
                let path = dir.join(format!("{}.json", self.name));
                write_text(&path, &pretty(&self.to_json(prov))?)?;
                Ok(path)
            }
        }
    }
}

fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Invariant(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Write a serializable value as `<dir>/<name>.json` under a provenance
/// envelope.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, prov: &Provenance, value: &T) -> Result<PathBuf> {
    let body = serde_json::to_value(value).map_err(|e| Error::Invariant(e.to_string()))?;
    let path = dir.join(format!("{name}.json"));
    write_text(&path, &pretty(&json!({ "provenance": prov, "report": body }))?)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rendering() {
        let mut t = Table::new("x", &["a", "b", "c"]);
        t.push(vec!["id,1".into(), 0.5.into(), Cell::Num(f64::NAN)]);
        t.note("no correction");
        let p = Provenance::for_config("seed = 1");
        let csv = t.to_csv(&p).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# stylodrift "));
        assert_eq!(lines[1], "# no correction");
        assert_eq!(lines[2], "a,b,c");
        assert_eq!(lines[3], "\"id,1\",0.5,NA");
        assert_eq!(p.config_sha256.len(), 64);
    }

    #[test]
    fn json_rows_are_objects() {
        let mut t = Table::new("x", &["a", "b"]);
        t.push(vec![1usize.into(), Cell::Empty]);
        let v = t.to_json(&Provenance::for_config(""));
        assert_eq!(v["rows"][0]["a"], json!(1));
        assert!(v["rows"][0]["b"].is_null());
    }
}
