//! Grid expansion: blocks in file order, then `q × m × k × N` row-major.

use tsallis_core::entropy::c_k;
use tsallis_core::gof::{check_feasible, NullFamily};

use crate::config::{ExperimentConfig, ExperimentKind, Source};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Feasible,
    Infeasible(String),
}

impl Status {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Status::Feasible)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Status::Feasible => "ok",
            Status::Infeasible(_) => "infeasible",
        }
    }

    pub fn note(&self) -> &str {
        match self {
            Status::Feasible => "",
            Status::Infeasible(msg) => msg,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    /// Global, zero-based position in the enumeration; fixes the RNG streams.
    pub index: usize,
    pub block: usize,
    /// Null family of the statistic (all kinds except consistency curves).
    pub family: Option<NullFamily>,
    pub source: Option<Source>,
    pub q: f64,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub status: Status,
}

/// Enumerates the cells of a resolved configuration. An infeasible cell in a
/// block that is not marked `expect_infeasible` is an error.
pub fn expand(config: &ExperimentConfig, source_check: impl Fn(&Cell) -> Option<String>) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for (b, block) in config.grid.iter().enumerate() {
        let ns = block.n.as_deref().unwrap_or_default();
        for &q in &block.q {
            for &m in &block.m {
                for &k in &block.k {
                    for &n in ns {
                        let family = match config.kind {
                            ExperimentKind::ConsistencyCurves => None,
                            _ => block.family.or_else(|| NullFamily::for_q(q)),
                        };
                        let mut cell = Cell {
                            index: cells.len(),
                            block: b,
                            family,
                            source: block.source,
                            q,
                            m,
                            k,
                            n,
                            status: Status::Feasible,
                        };
                        if let Some(reason) = infeasibility(config.kind, &cell)
                            .or_else(|| source_check(&cell))
                        {
                            if !block.expect_infeasible {
                                return Err(tsallis_core::Error::Infeasible(format!(
                                    "grid block {}, q = {q}, m = {m}, k = {k}, N = {n}: {reason}; \
                                     set expect_infeasible = true to emit a marker row",
                                    b + 1
                                ))
                                .into());
                            }
                            cell.status = Status::Infeasible(reason);
                        }
                        cells.push(cell);
                    }
                }
            }
        }
    }
    Ok(cells)
}

fn infeasibility(kind: ExperimentKind, cell: &Cell) -> Option<String> {
    if let Err(e) = c_k(cell.k, cell.q) {
        return Some(e.to_string());
    }
    if kind == ExperimentKind::ConsistencyCurves {
        return None;
    }
    match cell.family {
        None => Some(format!("no null family admits q = {}", cell.q)),
        Some(family) => check_feasible(family, cell.m, cell.q).err().map(|e| e.to_string()),
    }
}
