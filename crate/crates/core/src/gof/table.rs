//! Critical-value tables and their CSV form.
//!
//! Columns are `q,m,k,N,alpha,crit,M,seed`; further columns (provenance,
//! status) are ignored on read. Rows with an empty `crit` mark infeasible
//! cells and are skipped.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueRow {
    pub q: f64,
    pub m: usize,
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: f64,
    pub crit: f64,
    #[serde(rename = "M")]
    pub replications: usize,
    pub seed: u64,
}

#[derive(Deserialize)]
struct RawRow {
    q: f64,
    m: usize,
    k: usize,
    #[serde(rename = "N")]
    n: usize,
    alpha: f64,
    crit: Option<f64>,
    #[serde(rename = "M")]
    replications: usize,
    seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CriticalValueTable {
    rows: Vec<CriticalValueRow>,
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| format!(" at line {}", p.line())).unwrap_or_default();
    Error::InvalidInput(format!("critical-value table{line}: {e}"))
}

impl CriticalValueTable {
    pub fn new(rows: Vec<CriticalValueRow>) -> Result<Self> {
        for r in &rows {
            if !r.crit.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "critical value for q = {}, m = {}, k = {}, N = {} is not finite",
                    r.q, r.m, r.k, r.n
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[CriticalValueRow] {
        &self.rows
    }

    pub fn push(&mut self, row: CriticalValueRow) {
        self.rows.push(row);
    }

    pub fn lookup(&self, q: f64, m: usize, k: usize, n: usize, alpha: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| {
                r.m == m
                    && r.k == k
                    && r.n == n
                    && (r.q - q).abs() <= MATCH_TOL
                    && (r.alpha - alpha).abs() <= MATCH_TOL
            })
            .map(|r| r.crit)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut rows = Vec::new();
        for rec in rdr.deserialize::<RawRow>() {
            let raw = rec.map_err(csv_error)?;
            if let Some(crit) = raw.crit {
                rows.push(CriticalValueRow {
                    q: raw.q,
                    m: raw.m,
                    k: raw.k,
                    n: raw.n,
                    alpha: raw.alpha,
                    crit,
                    replications: raw.replications,
                    seed: raw.seed,
                });
            }
        }
        Self::new(rows)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        for r in &self.rows {
            wtr.serialize(r).map_err(csv_error)?;
        }
        wtr.flush()
            .map_err(|e| Error::InvalidInput(format!("writing critical-value table: {e}")))
    }
}
