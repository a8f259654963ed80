//! CSV tables and the JSON run summary.

use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

/// Marker of the timestamp line, skipped by comparison tooling.
pub const TIMESTAMP_PREFIX: &str = "# generated_at=";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
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

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Doubles with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Body without the timestamp line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&self.header.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format_f64(*v),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(t) if t.contains(',') || t.contains('"') => {
                        format!("\"{}\"", t.replace('"', "\"\""))
                    }
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn write(&self, dir: &Path) -> Result<String> {
        let file = format!("{}.csv", self.name);
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let body = format!("{TIMESTAMP_PREFIX}{stamp}\n{}", self.render());
        std::fs::write(dir.join(&file), body)?;
        Ok(file)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
}

impl Check {
    pub fn new(name: &str, passed: bool, measured: f64, threshold: f64) -> Self {
        Check { name: name.into(), passed, measured, threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub command: String,
    pub base_seed: u64,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
    pub passed: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(1.0 / 3.0).len(), "3.3333333333333331e-1".len());
    }

    #[test]
    fn quoting() {
        let mut t = Table::new("x", &["a", "b"]);
        t.push(vec![Cell::Text("p,q".into()), Cell::Int(3)]);
        assert_eq!(t.render(), "a,b\n\"p,q\",3\n");
    }
}
