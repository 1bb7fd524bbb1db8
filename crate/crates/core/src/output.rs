// SPDX-License-Identifier: Apache-2.0

//! CSV tables with a JSON header line, and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{QuenchError, Result};
use crate::scaling::hex;

/// Formats a float with 17 significant digits, the shortest width that
/// round-trips every `f64`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// Column-labelled table written as one CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_owned(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    /// Full file text: `# {json}` line, column names, rows.
    pub fn render(&self, manifest_hash: &str, experiment: &str) -> String {
        let header = json!({
            "manifest_sha256": manifest_hash,
            "experiment": experiment,
            "table": self.name,
            "columns": self.columns,
        });
        let mut out = String::new();
        writeln!(out, "# {header}").unwrap();
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    pub fn write(&self, dir: &Path, manifest_hash: &str, experiment: &str) -> Result<String> {
        let file = format!("{}.csv", self.name);
        fs::write(dir.join(&file), self.render(manifest_hash, experiment))?;
        Ok(file)
    }
}

/// Columns of a CSV written by [`Table::write`], plus its header JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCsv {
    pub header: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ParsedCsv {
    pub fn column(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| QuenchError::config(format!("no column `{name}`; have {}", self.columns.join(", "))))
    }

    pub fn numbers(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.column(name)?;
        self.rows
            .iter()
            .map(|r| {
                r[i].parse::<f64>()
                    .map_err(|_| QuenchError::config(format!("column `{name}` holds `{}`", r[i])))
            })
            .collect()
    }
}

pub fn read_csv(path: &Path) -> Result<ParsedCsv> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let first = lines.next().unwrap_or_default();
    let header = first
        .strip_prefix("# ")
        .ok_or_else(|| QuenchError::config(format!("{} lacks a `#` header line", path.display())))?;
    let header: Value = serde_json::from_str(header)?;
    let columns: Vec<String> = lines
        .next()
        .ok_or_else(|| QuenchError::config("missing column line"))?
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_owned).collect::<Vec<_>>())
        .collect::<Vec<_>>();
    if let Some(bad) = rows.iter().position(|r| r.len() != columns.len()) {
        return Err(QuenchError::config(format!("row {bad} has the wrong width")));
    }
    Ok(ParsedCsv { header, columns, rows })
}

/// SHA-256 over the canonical JSON of the reproducible part of a run.
pub fn manifest_hash(identity: &impl Serialize) -> String {
    let bytes = serde_json::to_vec(identity).expect("identity serializes");
    hex(&Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0, -0.0, f64::MIN_POSITIVE] {
            let s = format_number(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(format_number(0.5), "5.0000000000000000e-1");
        assert_eq!(format_number(f64::NAN), "nan");
    }

    #[test]
    fn table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("demo", &["tau", "C_nnn", "label"]);
        t.push(vec![2.0.into(), 0.125.into(), "a".into()]);
        t.push(vec![3.0.into(), 1e-9.into(), "b".into()]);
        let file = t.write(dir.path(), "abc", "sweep-tau").unwrap();
        let parsed = read_csv(&dir.path().join(file)).unwrap();
        assert_eq!(parsed.header["manifest_sha256"], "abc");
        assert_eq!(parsed.numbers("C_nnn").unwrap(), vec![0.125, 1e-9]);
        assert!(parsed.numbers("label").is_err());
        assert!(parsed.column("missing").is_err());
    }

    #[test]
    fn hash_is_stable() {
        let a = manifest_hash(&json!({"n": 200, "tau": 10.0}));
        assert_eq!(a, manifest_hash(&json!({"n": 200, "tau": 10.0})));
        assert_ne!(a, manifest_hash(&json!({"n": 200, "tau": 10.5})));
        assert_eq!(a.len(), 64);
    }
}
