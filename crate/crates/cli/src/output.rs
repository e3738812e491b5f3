//! CSV tables, convergence certificates and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Relative change allowed between cutoffs `N` and `N + 2`.
pub const CUTOFF_CHANGE_TOL: f64 = 1e-3;
/// Population allowed in the highest retained manifold.
pub const TOP_MANIFOLD_TOL: f64 = 1e-8;

/// Column value.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(k) => k.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Int(k as i64)
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

/// Shortest round-trip scientific notation; `NaN` for failed cells.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:e}")
    }
}

/// One CSV artifact. Columns carry their unit in brackets, e.g. `tau [1/kappa]`.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Adds a trailing `reason` column, empty on successful rows.
    pub with_reason: bool,
    pub reasons: Vec<String>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            with_reason: false,
            reasons: Vec::new(),
        }
    }

    /// A table whose rows may fail individually.
    pub fn with_reasons(name: &str, columns: &[&str]) -> Self {
        let mut t = Table::new(name, columns);
        t.with_reason = true;
        t
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
        self.reasons.push(String::new());
    }

    /// Row with the given input columns and NaN in all the others.
    pub fn push_failed(&mut self, mut inputs: Vec<Cell>, reason: impl ToString) {
        assert!(self.with_reason, "table {} has no reason column", self.name);
        inputs.resize(self.columns.len(), Cell::Num(f64::NAN));
        self.rows.push(inputs);
        let reason = reason.to_string().replace(['\n', '\r'], " ");
        self.reasons.push(if reason.trim().is_empty() { "unspecified failure".into() } else { reason });
    }

    pub fn failed_rows(&self) -> usize {
        self.reasons.iter().filter(|r| !r.is_empty()).count()
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    /// Column values as numbers (NaN for text).
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name || c.split(" [").next() == Some(name))?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[k] {
                    Cell::Num(x) => *x,
                    Cell::Int(i) => *i as f64,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn to_csv_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}").expect("write to memory");
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let mut header: Vec<&str> = self.columns.iter().map(String::as_str).collect();
        if self.with_reason {
            header.push("reason");
        }
        w.write_record(&header).expect("write to memory");
        for (row, reason) in self.rows.iter().zip(&self.reasons) {
            let mut rec: Vec<String> = row.iter().map(Cell::render).collect();
            if self.with_reason {
                rec.push(reason.clone());
            }
            w.write_record(&rec).expect("write to memory");
        }
        w.into_inner().expect("flush to memory")
    }
}

/// Stability of one observable under the truncation.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Certificate {
    pub label: String,
    pub cutoff: usize,
    pub top_manifold_population: Option<f64>,
    pub observable: String,
    pub value: f64,
    pub value_at_cutoff_plus_two: f64,
    pub relative_change: f64,
    pub converged: bool,
}

impl Certificate {
    pub fn new(label: &str, cutoff: usize, observable: &str, top: Option<f64>, value: f64, value_plus_two: f64) -> Self {
        let relative_change = ((value_plus_two - value) / value_plus_two).abs();
        let top_ok = top.is_none_or(|p| p < TOP_MANIFOLD_TOL);
        Certificate {
            label: label.to_string(),
            cutoff,
            top_manifold_population: top,
            observable: observable.to_string(),
            value,
            value_at_cutoff_plus_two: value_plus_two,
            relative_change,
            converged: top_ok && relative_change < CUTOFF_CHANGE_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
    pub rows: usize,
    pub failed_rows: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub steady_state_residual: f64,
    pub ode_rtol: f64,
    pub ode_atol: f64,
    pub top_manifold_population: f64,
    pub cutoff_relative_change: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisInfo {
    pub cutoff: usize,
    pub cutoff_limit: usize,
    pub states: Option<usize>,
    pub frame: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub experiment: String,
    pub version: String,
    pub resolution: String,
    pub reduced_resolution: bool,
    pub config: serde_json::Value,
    pub units: String,
    pub tolerances: Tolerances,
    pub basis: BasisInfo,
    pub converged: bool,
    pub certificates: Vec<Certificate>,
    pub summary: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub wall_time_s: f64,
    pub artifacts: Vec<Artifact>,
}

impl RunManifest {
    pub fn file_name(experiment: &str) -> String {
        format!("{experiment}-manifest.json")
    }

    /// Manifest with the wall time zeroed, for comparisons across runs.
    pub fn without_timing(&self) -> RunManifest {
        RunManifest { wall_time_s: 0.0, ..self.clone() }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes every table and returns their artifact records in table order.
pub fn write_tables(dir: &Path, tables: &[Table]) -> std::io::Result<Vec<Artifact>> {
    fs::create_dir_all(dir)?;
    let mut out = Vec::with_capacity(tables.len());
    for t in tables {
        let bytes = t.to_csv_bytes();
        fs::write(dir.join(t.file_name()), &bytes)?;
        out.push(Artifact { file: t.file_name(), sha256: sha256_hex(&bytes), rows: t.rows.len(), failed_rows: t.failed_rows() });
    }
    Ok(out)
}

pub fn write_manifest(dir: &Path, m: &RunManifest) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(m).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(dir.join(RunManifest::file_name(&m.experiment)), text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_metadata_then_header() {
        let mut t = Table::with_reasons("demo", &["x [kappa]", "g2 [1]"]).meta("experiment", "demo");
        t.push(vec![0.5.into(), 1e-3.into()]);
        t.push_failed(vec![0.75.into()], "steady state did not converge,\nretry");
        let s = String::from_utf8(t.to_csv_bytes()).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# experiment: demo");
        assert_eq!(lines[1], "x [kappa],g2 [1],reason");
        assert_eq!(lines[2], "5e-1,1e-3,");
        assert_eq!(lines[3], "7.5e-1,NaN,\"steady state did not converge, retry\"");
        assert_eq!(t.failed_rows(), 1);
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 6.02e23] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn certificate_flags_unstable_truncation() {
        assert!(Certificate::new("a", 8, "g2", Some(1e-12), 0.1, 0.10001).converged);
        assert!(!Certificate::new("b", 8, "g2", Some(1e-12), 0.1, 0.11).converged);
        assert!(!Certificate::new("c", 8, "g2", Some(1e-6), 0.1, 0.1).converged);
    }

    #[test]
    fn column_lookup_ignores_units() {
        let mut t = Table::new("demo", &["tau [1/kappa]"]);
        t.push(vec![2.0.into()]);
        assert_eq!(t.column("tau").unwrap(), vec![2.0]);
    }
}
