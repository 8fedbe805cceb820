//! Experiment configuration files.
//!
//! A configuration is a TOML document: top-level keys describe the run and
//! each `[[grid]]` block adds the Cartesian product of its `q`, `m`, `k` and
//! `N` lists. Unknown keys are rejected.
//!
//! ```toml
//! kind = "critical-values"   # critical-values | normality-sweep | convergence
//!                            # | consistency-curves | distribution-shape
//! master_seed = 20240601
//! replications = 200         # M; default 200, or 1000 with full_scale
//! alpha = [0.05, 0.01]       # critical-values only; default [0.05]
//! engine = "tree"            # tree | brute-force
//! # batch_size = 100         # normality-sweep only: statistics per Shapiro-Wilk batch
//! # density_draws = 100000   # distribution-shape only: model draws per density grid
//! # full_scale = false       # M = 1000 and density_draws = 1e6 defaults
//! # output = "out/table1"    # default output directory
//!
//! [[grid]]
//! family = "T1"              # optional, inferred from q
//! q = [1.2]
//! m = [2, 3]
//! k = [1, 2, 3]
//! N = [100, 500, 1000]       # default 100, 200, 500, 1000, 2000
//!
//! [[grid]]
//! q = [2.5]
//! m = [3]
//! k = [1]
//! N = [100]
//! expect_infeasible = true   # emit marker rows instead of failing
//! ```
//!
//! `consistency-curves` blocks also carry the data source, e.g.
//! `source = { kind = "qgauss", q = 0.5 }`; there `q` is the estimator order.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tsallis_core::gof::NullFamily;
use tsallis_core::knn::Engine;

use crate::error::{config_err, HarnessError, Result};

pub const DESK_REPLICATIONS: usize = 200;
pub const FULL_REPLICATIONS: usize = 1000;
pub const DESK_SAMPLE_SIZES: [usize; 5] = [100, 200, 500, 1000, 2000];
pub const DEFAULT_BATCH_SIZE: usize = 100;
pub const DESK_DENSITY_DRAWS: usize = 100_000;
pub const FULL_DENSITY_DRAWS: usize = 1_000_000;
/// Critical-value tables need at least this many replications.
pub const MIN_TABLE_REPLICATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CriticalValues,
    NormalitySweep,
    Convergence,
    ConsistencyCurves,
    DistributionShape,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::CriticalValues => "critical-values",
            ExperimentKind::NormalitySweep => "normality-sweep",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::ConsistencyCurves => "consistency-curves",
            ExperimentKind::DistributionShape => "distribution-shape",
        })
    }
}

/// Data-generating law of a consistency curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", try_from = "RawSource")]
pub enum Source {
    /// Uniform on the unit cube `[0, 1]^m`.
    Uniform,
    /// Standard normal `N(0, I)`.
    Gaussian,
    /// q-Gaussian with identity shape matrix.
    Qgauss { q: f64 },
    /// Generalized Gaussian with identity shape matrix.
    GeneralizedGaussian { s: f64 },
}

/// Flat form of [`Source`], so that stray keys are rejected for every kind.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    kind: String,
    q: Option<f64>,
    s: Option<f64>,
}

impl TryFrom<RawSource> for Source {
    type Error = String;

    fn try_from(raw: RawSource) -> std::result::Result<Self, String> {
        let source = match (raw.kind.as_str(), raw.q, raw.s) {
            ("uniform", None, None) => Source::Uniform,
            ("gaussian", None, None) => Source::Gaussian,
            ("qgauss", Some(q), None) => Source::Qgauss { q },
            ("generalized-gaussian", None, Some(s)) => Source::GeneralizedGaussian { s },
            ("uniform" | "gaussian", _, _) => {
                return Err(format!("source kind `{}` takes no parameters", raw.kind))
            }
            ("qgauss", _, _) => return Err("source kind `qgauss` takes exactly `q`".into()),
            ("generalized-gaussian", _, _) => {
                return Err("source kind `generalized-gaussian` takes exactly `s`".into())
            }
            (other, _, _) => {
                return Err(format!(
                    "unknown source kind `{other}`; expected uniform, gaussian, qgauss \
                     or generalized-gaussian"
                ))
            }
        };
        Ok(source)
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Uniform => f.write_str("uniform"),
            Source::Gaussian => f.write_str("gaussian"),
            Source::Qgauss { q } => write!(f, "qgauss(q={q})"),
            Source::GeneralizedGaussian { s } => write!(f, "generalized-gaussian(s={s})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    #[serde(default)]
    pub family: Option<NullFamily>,
    pub q: Vec<f64>,
    pub m: Vec<usize>,
    pub k: Vec<usize>,
    #[serde(rename = "N", default)]
    pub n: Option<Vec<usize>>,
    #[serde(default)]
    pub expect_infeasible: bool,
    #[serde(default)]
    pub source: Option<Source>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub master_seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub full_scale: bool,
    #[serde(default)]
    pub replications: Option<usize>,
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub alpha: Option<Vec<f64>>,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default)]
    pub density_draws: Option<usize>,
    pub grid: Vec<GridBlock>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    /// Fills every default and validates the schema. Resolution is
    /// idempotent, and two configurations describing the same run resolve to
    /// the same value.
    pub fn resolve(&self) -> Result<Self> {
        let mut c = self.clone();
        let kind = c.kind;
        let only = |present: bool, key: &str, wanted: ExperimentKind| -> Result<()> {
            if present && kind != wanted {
                return config_err(format!("key `{key}` applies only to kind = \"{wanted}\""));
            }
            Ok(())
        };
        only(c.alpha.is_some(), "alpha", ExperimentKind::CriticalValues)?;
        only(c.batch_size.is_some(), "batch_size", ExperimentKind::NormalitySweep)?;
        only(c.density_draws.is_some(), "density_draws", ExperimentKind::DistributionShape)?;

        let m_default = if c.full_scale { FULL_REPLICATIONS } else { DESK_REPLICATIONS };
        let reps = *c.replications.get_or_insert(m_default);
        let min_reps = match kind {
            ExperimentKind::CriticalValues => MIN_TABLE_REPLICATIONS,
            ExperimentKind::NormalitySweep => 1,
            _ => 2,
        };
        if reps < min_reps {
            return config_err(format!(
                "replications = {reps} is below the minimum {min_reps} for kind = \"{kind}\""
            ));
        }

        match kind {
            ExperimentKind::CriticalValues => {
                let alphas = c.alpha.get_or_insert_with(|| vec![0.05]);
                if alphas.is_empty() {
                    return config_err("alpha must list at least one level");
                }
                if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a <= 0.5)) {
                    return config_err(format!("alpha = {a} must lie in (0, 0.5]"));
                }
            }
            ExperimentKind::NormalitySweep => {
                let n = *c.batch_size.get_or_insert(DEFAULT_BATCH_SIZE);
                if n < 3 {
                    return Err(tsallis_core::Error::Domain(format!(
                        "batch_size = {n}: Shapiro-Wilk needs at least 3 statistics per batch"
                    ))
                    .into());
                }
            }
            ExperimentKind::DistributionShape => {
                let d_default = if c.full_scale { FULL_DENSITY_DRAWS } else { DESK_DENSITY_DRAWS };
                if *c.density_draws.get_or_insert(d_default) < 2 {
                    return config_err("density_draws must be at least 2");
                }
            }
            _ => {}
        }

        if c.grid.is_empty() {
            return config_err("at least one [[grid]] block is required");
        }
        for (b, block) in c.grid.iter_mut().enumerate() {
            let at = format!("grid block {}", b + 1);
            if block.q.is_empty() || block.m.is_empty() || block.k.is_empty() {
                return config_err(format!("{at}: q, m and k must be non-empty"));
            }
            if let Some(q) = block.q.iter().find(|q| !q.is_finite()) {
                return config_err(format!("{at}: q = {q} is not finite"));
            }
            if block.m.contains(&0) || block.k.contains(&0) {
                return config_err(format!("{at}: m and k must be at least 1"));
            }
            let ns = block.n.get_or_insert_with(|| DESK_SAMPLE_SIZES.to_vec());
            let k_max = *block.k.iter().max().expect("non-empty");
            if let Some(n) = ns.iter().find(|n| **n <= k_max) {
                return config_err(format!("{at}: N = {n} must exceed every k (max {k_max})"));
            }
            if ns.is_empty() {
                return config_err(format!("{at}: N must be non-empty"));
            }
            if kind == ExperimentKind::Convergence {
                let mut distinct = ns.clone();
                distinct.sort_unstable();
                distinct.dedup();
                if distinct.len() < 3 {
                    return config_err(format!(
                        "{at}: convergence needs at least 3 distinct N values"
                    ));
                }
            }
            match (kind, &block.source) {
                (ExperimentKind::ConsistencyCurves, None) => {
                    return config_err(format!("{at}: consistency-curves blocks need a source"));
                }
                (ExperimentKind::ConsistencyCurves, Some(_)) => {
                    if block.family.is_some() {
                        return config_err(format!(
                            "{at}: key `family` does not apply to consistency-curves"
                        ));
                    }
                }
                (_, Some(_)) => {
                    return config_err(format!(
                        "{at}: key `source` applies only to kind = \"consistency-curves\""
                    ));
                }
                (_, None) => {}
            }
        }
        Ok(c)
    }

    pub fn replications(&self) -> usize {
        self.replications.unwrap_or(if self.full_scale {
            FULL_REPLICATIONS
        } else {
            DESK_REPLICATIONS
        })
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration,
    /// ignoring the output location.
    pub fn hash(&self) -> Result<String> {
        let mut c = self.resolve()?;
        c.output = None;
        let json = serde_json::to_string(&c)
            .map_err(|e| HarnessError::Config(format!("cannot serialise configuration: {e}")))?;
        Ok(hex::encode(Sha256::digest(json.as_bytes())))
    }
}
