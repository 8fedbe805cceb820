//! Deterministic parallel execution with a per-cell result cache.
//!
//! Replication `r` of cell `c` always draws from stream `c · stride + r` of
//! the master seed, and results are collected in replication order, so the
//! values do not depend on the number of workers. Finished cells are stored
//! under the output directory and reused on the next run of the same
//! configuration.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, HarnessError, Result};

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so an interrupted write never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| HarnessError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| HarnessError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| HarnessError::io(path, e))?;
    tmp.persist(path).map_err(|e| HarnessError::io(path, e.error))?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct CachedCell {
    count: usize,
    /// IEEE-754 bit patterns, for exact round trips.
    bits: Vec<u64>,
}

pub(crate) struct Executor {
    pool: rayon::ThreadPool,
    cache: Option<PathBuf>,
    seed: u64,
    stride: u64,
    pub computed: usize,
    pub cached: usize,
}

impl Executor {
    pub fn new(workers: usize, seed: u64, stride: usize, cache: Option<PathBuf>) -> Result<Self> {
        if workers == 0 {
            return config_err("worker count must be at least 1");
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?;
        Ok(Self {
            pool,
            cache,
            seed,
            stride: stride as u64,
            computed: 0,
            cached: 0,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// First stream index of a cell.
    pub fn base_stream(&self, cell: usize) -> Result<u64> {
        (cell as u64)
            .checked_mul(self.stride)
            .ok_or_else(|| HarnessError::Config("grid too large for the stream layout".into()))
    }

    /// Runs `task` inside the worker pool.
    pub fn install<T: Send>(&self, task: impl FnOnce() -> T + Send) -> T {
        self.pool.install(task)
    }

    /// `count` values of a cell; replication `r` receives stream
    /// `base_stream(cell) + r`.
    pub fn cell_values<F>(&mut self, cell: usize, count: usize, f: F) -> Result<Vec<f64>>
    where
        F: Fn(u64, u64) -> tsallis_core::Result<f64> + Sync,
    {
        if let Some(values) = self.load(cell, count)? {
            self.cached += 1;
            debug!("cell {cell}: reused {count} cached values");
            return Ok(values);
        }
        let base = self.base_stream(cell)?;
        let seed = self.seed;
        let values: Vec<f64> = self.pool.install(|| {
            (0..count as u64)
                .into_par_iter()
                .map(|r| f(seed, base + r))
                .collect::<tsallis_core::Result<_>>()
        })?;
        self.store(cell, &values)?;
        self.computed += 1;
        debug!("cell {cell}: computed {count} values");
        Ok(values)
    }

    fn cell_path(&self, cell: usize) -> Option<PathBuf> {
        self.cache.as_ref().map(|d| d.join(format!("cell-{cell:06}.json")))
    }

    fn load(&self, cell: usize, count: usize) -> Result<Option<Vec<f64>>> {
        let Some(path) = self.cell_path(cell) else {
            return Ok(None);
        };
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(HarnessError::io(path, e)),
        };
        // Unreadable or mismatched entries are recomputed.
        match serde_json::from_str::<CachedCell>(&text) {
            Ok(c) if c.count == count && c.bits.len() == count => {
                Ok(Some(c.bits.into_iter().map(f64::from_bits).collect()))
            }
            _ => Ok(None),
        }
    }

    fn store(&self, cell: usize, values: &[f64]) -> Result<()> {
        let Some(path) = self.cell_path(cell) else {
            return Ok(());
        };
        let entry = CachedCell {
            count: values.len(),
            bits: values.iter().map(|v| v.to_bits()).collect(),
        };
        let json = serde_json::to_vec(&entry).expect("plain data serialises");
        write_atomic(&path, &json)
    }
}
