//! CSV result tables with provenance columns.

use crate::error::{HarnessError, Result};
use crate::plan::Status;

/// Columns appended to every result row.
pub const PROVENANCE_COLUMNS: [&str; 4] = ["status", "note", "config_hash", "version"];

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub config_hash: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        let header = columns
            .iter()
            .chain(&PROVENANCE_COLUMNS)
            .map(|c| c.to_string())
            .collect();
        Self {
            name: name.to_string(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, mut fields: Vec<String>, status: &Status, prov: &Provenance) {
        debug_assert_eq!(fields.len() + PROVENANCE_COLUMNS.len(), self.header.len());
        fields.push(status.label().to_string());
        fields.push(status.note().to_string());
        fields.push(prov.config_hash.clone());
        fields.push(prov.version.clone());
        self.rows.push(fields);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| HarnessError::Config(format!("{}: {e}", self.name));
        w.write_record(&self.header).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row).map_err(fail)?;
        }
        w.into_inner()
            .map_err(|e| HarnessError::Config(format!("{}: {e}", self.name)))
    }
}

/// Shortest round-trip decimal form.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}
