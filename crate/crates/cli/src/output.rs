//! CSV tables and their run manifests.

use crate::error::CliResult;
use serde::Serialize;
use serde_json::Value;
use std::path::{Path, PathBuf};

/// Floats with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A table in grid order, written in one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| crate::error::CliError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| crate::error::CliError::Io(e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub config_digest: String,
    pub command: String,
    pub timestamp: String,
    pub tolerances: Value,
    pub thresholds: Value,
    pub workers: usize,
    pub output: String,
    pub summary: Value,
}

pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

/// Writes `<dir>/<name>.csv` and its manifest; returns the CSV path.
pub fn write_outputs(dir: &Path, name: &str, table: &Table, manifest: &RunManifest) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{name}.csv"));
    std::fs::write(&csv, table.to_csv()?)?;
    let mut body = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    body.push('\n');
    std::fs::write(manifest_path(&csv), body)?;
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(1.0 / std::f64::consts::PI), "3.1830988618379069e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
    }

    #[test]
    fn csv_dialect() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(s, "a,b\n1,\"x,y\"\n");
    }

    #[test]
    fn manifest_sits_next_to_csv() {
        assert_eq!(manifest_path(Path::new("out/density.csv")), Path::new("out/density.manifest.json"));
    }
}
