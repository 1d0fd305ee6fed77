//! Report bundles: one CSV table per measure plus a JSON summary.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::Error;

/// A CSV table whose second row states each column's unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub units: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// `columns` pairs each column name with its unit (`-` when unitless).
    pub fn new(name: &str, columns: &[(&str, &str)]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.0.to_string()).collect(),
            units: columns.iter().map(|c| c.1.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }
}

pub fn format_distance(ft: f64) -> String {
    format!("{ft:.2}")
}

pub fn format_p(p: f64) -> String {
    format!("{p:.6e}")
}

pub fn write_csv_table(dir: &Path, t: &Table) -> Result<PathBuf, Error> {
    let path = dir.join(format!("{}.csv", t.name));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(&path).map_err(csv_err)?;
    w.write_record(&t.columns).map_err(csv_err)?;
    w.write_record(&t.units).map_err(csv_err)?;
    for r in &t.rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(path)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportBundle {
    pub tables: Vec<Table>,
    pub summary: Value,
}

impl ReportBundle {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Writes every table and `report.json` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, Error> {
        fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for t in &self.tables {
            out.push(write_csv_table(dir, t)?);
        }
        let json = dir.join("report.json");
        fs::write(&json, serde_json::to_string_pretty(&self.summary).expect("summary serialises") + "\n")?;
        out.push(json);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_row_and_quoting() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("demo", &[("name", "-"), ("distance", "ft")]);
        t.push(vec!["a,b".into(), format_distance(267.0)]);
        let p = write_csv_table(dir.path(), &t).unwrap();
        let text = fs::read_to_string(p).unwrap();
        assert_eq!(text, "name,distance\r\n-,ft\r\n\"a,b\",267.00\r\n");
    }

    #[test]
    fn number_formats() {
        assert_eq!(format_p(0.000123), "1.230000e-4");
        assert_eq!(format_distance(-3.14159), "-3.14");
    }
}
