//! Tabular results with a JSON summary and provenance.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// Reals are written with 17 significant digits.
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema_version: u32,
    /// SHA-256 of the resolved config without output and thread settings.
    pub config_hash: String,
}

impl Provenance {
    pub fn for_config(config: &ExperimentConfig) -> Self {
        let canonical = serde_json::to_string(&config.fingerprint()).expect("config serialises");
        Provenance {
            tool: "riesz-lab",
            version: env!("CARGO_PKG_VERSION"),
            schema_version: SCHEMA_VERSION,
            config_hash: hex::encode(Sha256::digest(canonical.as_bytes())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Value,
    pub config: ExperimentConfig,
    pub provenance: Provenance,
}

impl ScanReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }

    pub fn to_json(&self) -> String {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "provenance": self.provenance,
            "config": self.config,
            "rows": self.rows.len(),
            "columns": self.columns,
            "summary": self.summary,
        });
        serde_json::to_string_pretty(&doc).expect("report serialises") + "\n"
    }

    /// Writes `<prefix>.csv` and `<prefix>.json`.
    pub fn write(&self, prefix: &str) -> Result<(), CliError> {
        for (ext, body) in [("csv", self.to_csv()), ("json", self.to_json())] {
            let path = format!("{prefix}.{ext}");
            std::fs::write(&path, body).map_err(|source| CliError::Io { path, source })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_keep_seventeen_digits() {
        assert_eq!(Cell::Real(0.1).render(), "1.0000000000000001e-1");
        assert_eq!(Cell::Real(16.0).render(), "1.6000000000000000e1");
        let x: f64 = Cell::Real(std::f64::consts::PI).render().parse().unwrap();
        assert_eq!(x, std::f64::consts::PI);
    }

    #[test]
    fn text_with_commas_is_quoted() {
        let r = ScanReport {
            columns: vec!["domain"],
            rows: vec![vec![Cell::Text("box:1,1".into())]],
            summary: Value::Null,
            config: ExperimentConfig::default(),
            provenance: Provenance::for_config(&ExperimentConfig::default()),
        };
        assert_eq!(r.to_csv(), "domain\n\"box:1,1\"\n");
    }
}
