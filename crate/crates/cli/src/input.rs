//! Numeric CSV input.
//!
//! The first line is treated as a header when any of its fields fails to
//! parse as a number. Every remaining row must have the same arity.

use std::path::Path;

use tsallis_core::{SampleMatrix, SymPDMatrix};

use crate::error::CliError;

/// Parses numeric CSV text into rows, returning the column count.
pub fn parse_rows(text: &str, origin: &str) -> Result<(usize, Vec<f64>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut width: Option<usize> = None;
    let mut data = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(format!("{origin}: {e}")))?;
        let line = record.position().map_or(index as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if index == 0 && parsed.iter().any(Result::is_err) {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(CliError::Input(format!(
                "{origin}, line {line}: expected {expected} fields, found {}",
                record.len()
            )));
        }
        for (column, (value, raw)) in parsed.into_iter().zip(record.iter()).enumerate() {
            match value {
                Ok(v) if v.is_finite() => data.push(v),
                _ => {
                    return Err(CliError::Input(format!(
                        "{origin}, line {line}, column {}: `{raw}` is not a finite number",
                        column + 1
                    )))
                }
            }
        }
    }
    match width {
        Some(w) => Ok((w, data)),
        None => Err(CliError::Input(format!("{origin}: no data rows"))),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_sample(path: &Path) -> Result<SampleMatrix, CliError> {
    let origin = path.display().to_string();
    let (m, data) = parse_rows(&read_text(path)?, &origin)?;
    let n = data.len() / m;
    SampleMatrix::new(n, m, data).map_err(|e| CliError::Input(format!("{origin}: {e}")))
}

/// Reads an `m × m` shape matrix and checks symmetry and positive definiteness.
pub fn read_shape(path: &Path, m: usize) -> Result<SymPDMatrix, CliError> {
    let origin = path.display().to_string();
    let (width, data) = parse_rows(&read_text(path)?, &origin)?;
    if width != m || data.len() != m * m {
        return Err(CliError::Input(format!(
            "{origin}: expected a {m} x {m} matrix, found {} rows of {width}",
            data.len() / width
        )));
    }
    SymPDMatrix::new(m, data).map_err(|e| CliError::Input(format!("{origin}: {e}")))
}
