//! Machine-readable reports.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => serde_json::to_string(v).expect("finite float"),
            Cell::Text(v) => v.clone(),
            Cell::Bool(v) => v.to_string(),
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

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.to_owned(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub command: String,
    pub config: Map<String, Value>,
    pub results: Vec<Table>,
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    pub fn new(command: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_owned(),
            config: Map::new(),
            results: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl Into<Value>) {
        self.config.insert(key.to_owned(), value.into());
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.results.iter().find(|t| t.name == name)
    }

    /// Rejects reports carrying NaN or infinite values.
    pub fn check_finite(&self) -> CliResult<()> {
        for t in &self.results {
            for row in &t.rows {
                for (cell, col) in row.iter().zip(&t.columns) {
                    if let Cell::Num(v) = cell {
                        if !v.is_finite() {
                            return Err(CliError::Runtime(format!("non-finite value in {}.{col}", t.name)));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Flat tables separated by blank lines; metadata on `#` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# schema_version={}", self.schema_version);
        let _ = writeln!(out, "# command={}", self.command);
        for (k, v) in &self.config {
            let _ = writeln!(out, "# config.{k}={v}");
        }
        for w in &self.warnings {
            let _ = writeln!(out, "# warning={w}");
        }
        for t in &self.results {
            let _ = writeln!(out, "\n# table={}", t.name);
            let _ = writeln!(out, "{}", t.columns.join(","));
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(Cell::render).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
        }
        out
    }
}

/// A two-column plot file.
pub struct Points {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

pub fn write_points(dir: &Path, sets: &[Points]) -> CliResult<()> {
    let io_err = |e: std::io::Error| CliError::Runtime(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io_err)?;
    for set in sets {
        let mut body = format!("# {} {}\n", set.x_label, set.y_label);
        for (x, y) in &set.points {
            let _ = writeln!(body, "{x} {y}");
        }
        fs::write(dir.join(format!("{}.dat", set.name)), body).map_err(io_err)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> AnalysisReport {
        let mut r = AnalysisReport::new("demo");
        r.config("window", 20);
        let mut t = Table::new("points", &["n_bins", "f_q", "label"]);
        t.push(vec![4usize.into(), 1.25.into(), "pos".into()]);
        r.results.push(t);
        r
    }

    #[test]
    fn json_shape() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["results"][0]["rows"][0][1], 1.25);
        assert_eq!(v["config"]["window"], 20);
    }

    #[test]
    fn csv_shape() {
        let csv = sample().to_csv();
        assert!(csv.contains("# table=points\nn_bins,f_q,label\n4,1.25,pos\n"));
        assert!(csv.contains("# config.window=20"));
    }

    #[test]
    fn non_finite_is_rejected() {
        let mut r = sample();
        r.results[0].rows[0][1] = Cell::Num(f64::NAN);
        assert!(matches!(r.check_finite(), Err(CliError::Runtime(_))));
    }
}
