//! The five experiment kinds.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use log::info;
use tsallis_core::distributions::{
    gg_sample, gg_tsallis_entropy, qgauss_power_integral, qgauss_sample, GGParams,
    QGaussianParams,
};
use tsallis_core::entropy::{check_consistency_conditions, tsallis_knn_estimate, ConsistencyReport};
use tsallis_core::gof::{critical_value, CriticalValueRow, CriticalValueTable, NullDesign};
use tsallis_core::knn::Engine;
use tsallis_core::linalg::ordered_sum;
use tsallis_core::mathcore::{draw_standard_normal, draw_uniform};
use tsallis_core::statkit::{
    freedman_diaconis, normal_qq_points, ols_slope_with_offset, shapiro_wilk, Histogram,
    RegressionFit,
};
use tsallis_core::{RngStream, SampleMatrix, SymPDMatrix};

use crate::config::{ExperimentConfig, ExperimentKind, Source};
use crate::error::{config_err, Result};
use crate::exec::{write_atomic, Executor};
use crate::output::{num, opt_num, Provenance, Table, VERSION};
use crate::plan::{expand, Cell, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub workers: usize,
    /// Reuse finished cells from earlier runs of the same configuration.
    pub resume: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            resume: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub cells: usize,
    pub computed: usize,
    pub cached: usize,
    pub infeasible: usize,
}

struct Context {
    config: ExperimentConfig,
    cells: Vec<Cell>,
    exec: Executor,
    prov: Provenance,
}

impl Context {
    fn new(config: &ExperimentConfig, workers: usize, cache_root: Option<&Path>) -> Result<Self> {
        let config = config.resolve()?;
        let hash = config.hash()?;
        let cells = match config.kind {
            ExperimentKind::ConsistencyCurves => expand(&config, |c| {
                let source = c.source.expect("validated");
                source_info(source, c.m, c.q, c.k).err().map(|e| e.to_string())
            })?,
            _ => expand(&config, |_| None)?,
        };
        let m = config.replications();
        let stride = match config.kind {
            ExperimentKind::NormalitySweep => m * config.batch_size.expect("resolved"),
            _ => m,
        };
        let cache = cache_root.map(|root| root.join(".cache").join(&hash));
        let exec = Executor::new(workers, config.master_seed, stride, cache)?;
        Ok(Self {
            config,
            cells,
            exec,
            prov: Provenance {
                config_hash: hash,
                version: VERSION.to_string(),
            },
        })
    }

    fn engine(&self) -> Engine {
        self.config.engine
    }

    fn seed(&self) -> u64 {
        self.exec.seed()
    }

    /// `count` null statistics `Q` of a feasible cell.
    fn null_statistics(&mut self, cell: &Cell, count: usize) -> Result<Vec<f64>> {
        let family = cell.family.expect("feasible cells have a family");
        let mut design = NullDesign::standard(family, cell.m, cell.q, cell.k, cell.n);
        design.opts.engine = self.engine();
        self.exec
            .cell_values(cell.index, count, |seed, stream| design.replicate(seed, stream))
    }
}

fn expect_kind(config: &ExperimentConfig, wanted: ExperimentKind) -> Result<()> {
    if config.kind != wanted {
        return config_err(format!(
            "configuration has kind = \"{}\", expected \"{wanted}\"",
            config.kind
        ));
    }
    Ok(())
}

fn mean(values: &[f64]) -> f64 {
    ordered_sum(&mut values.to_vec()) / values.len() as f64
}

/// Sample standard deviation with divisor `n − 1`.
fn std_dev(values: &[f64]) -> f64 {
    let mu = mean(values);
    let mut sq: Vec<f64> = values.iter().map(|v| (v - mu) * (v - mu)).collect();
    (ordered_sum(&mut sq) / (values.len() as f64 - 1.0)).sqrt()
}

// ---------------------------------------------------------------- critical values

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalRow {
    pub q: f64,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub alpha: f64,
    pub crit: Option<f64>,
    pub replications: usize,
    pub seed: u64,
    pub status: Status,
}

fn critical_rows(ctx: &mut Context) -> Result<Vec<CriticalRow>> {
    let m = ctx.config.replications();
    let alphas = ctx.config.alpha.clone().expect("resolved");
    let mut rows = Vec::new();
    for cell in ctx.cells.clone() {
        let stats = if cell.status.is_feasible() {
            Some(ctx.null_statistics(&cell, m)?)
        } else {
            None
        };
        for &alpha in &alphas {
            let crit = stats.as_deref().map(|s| critical_value(s, alpha)).transpose()?;
            rows.push(CriticalRow {
                q: cell.q,
                m: cell.m,
                k: cell.k,
                n: cell.n,
                alpha,
                crit,
                replications: m,
                seed: ctx.seed(),
                status: cell.status.clone(),
            });
        }
        info!("critical values: cell {} of {}", cell.index + 1, ctx.cells.len());
    }
    Ok(rows)
}

fn critical_table(rows: &[CriticalRow], prov: &Provenance) -> Table {
    let mut t = Table::new(
        "critical_values.csv",
        &["q", "m", "k", "N", "alpha", "crit", "M", "seed"],
    );
    for r in rows {
        t.push(
            vec![
                num(r.q),
                r.m.to_string(),
                r.k.to_string(),
                r.n.to_string(),
                num(r.alpha),
                opt_num(r.crit),
                r.replications.to_string(),
                r.seed.to_string(),
            ],
            &r.status,
            prov,
        );
    }
    t
}

fn to_table(rows: &[CriticalRow]) -> Result<CriticalValueTable> {
    let rows = rows
        .iter()
        .filter_map(|r| {
            r.crit.map(|crit| CriticalValueRow {
                q: r.q,
                m: r.m,
                k: r.k,
                n: r.n,
                alpha: r.alpha,
                crit,
                replications: r.replications,
                seed: r.seed,
            })
        })
        .collect();
    Ok(CriticalValueTable::new(rows)?)
}

/// Simulates the null statistic in every feasible cell and records its upper
/// `α` points. Infeasible cells are left out of the returned table; the CSV
/// written by [`run_experiment`] carries them as marker rows.
pub fn run_critical_values(config: &ExperimentConfig, workers: usize) -> Result<CriticalValueTable> {
    expect_kind(config, ExperimentKind::CriticalValues)?;
    let mut ctx = Context::new(config, workers, None)?;
    to_table(&critical_rows(&mut ctx)?)
}

// ---------------------------------------------------------------- normality sweep

#[derive(Debug, Clone, PartialEq)]
pub struct NormalityRow {
    pub q: f64,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    /// Mean Shapiro–Wilk p-value over the `M` batches.
    pub mean_p: Option<f64>,
    pub replications: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub status: Status,
}

fn normality_rows(ctx: &mut Context) -> Result<Vec<NormalityRow>> {
    let m = ctx.config.replications();
    let n = ctx.config.batch_size.expect("resolved");
    let mut rows = Vec::new();
    for cell in ctx.cells.clone() {
        let mean_p = if cell.status.is_feasible() {
            let stats = ctx.null_statistics(&cell, m * n)?;
            let p: Vec<f64> = stats
                .chunks(n)
                .map(|batch| shapiro_wilk(batch).map(|r| r.p_value))
                .collect::<tsallis_core::Result<_>>()?;
            Some(mean(&p))
        } else {
            None
        };
        rows.push(NormalityRow {
            q: cell.q,
            m: cell.m,
            k: cell.k,
            n: cell.n,
            mean_p,
            replications: m,
            batch_size: n,
            seed: ctx.seed(),
            status: cell.status.clone(),
        });
        info!("normality sweep: cell {} of {}", cell.index + 1, ctx.cells.len());
    }
    Ok(rows)
}

fn normality_table(rows: &[NormalityRow], prov: &Provenance) -> Table {
    let mut t = Table::new("normality.csv", &["q", "m", "k", "N", "mean_p", "M", "n", "seed"]);
    for r in rows {
        t.push(
            vec![
                num(r.q),
                r.m.to_string(),
                r.k.to_string(),
                r.n.to_string(),
                opt_num(r.mean_p),
                r.replications.to_string(),
                r.batch_size.to_string(),
                r.seed.to_string(),
            ],
            &r.status,
            prov,
        );
    }
    t
}

/// Per cell: `M` batches of `n` null statistics, each batch scored by
/// Shapiro–Wilk, and the mean p-value.
pub fn run_normality_sweep(config: &ExperimentConfig, workers: usize) -> Result<Vec<NormalityRow>> {
    expect_kind(config, ExperimentKind::NormalitySweep)?;
    let mut ctx = Context::new(config, workers, None)?;
    normality_rows(&mut ctx)
}

// ---------------------------------------------------------------- convergence

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub q: f64,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub mean_q: Option<f64>,
    pub std_q: Option<f64>,
    pub mean_abs_q: Option<f64>,
    pub replications: usize,
    pub seed: u64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionRow {
    pub q: f64,
    pub m: usize,
    pub k: usize,
    /// Fit of `log mean|Q| + ½ log N` on `log N`.
    pub fit: Option<RegressionFit>,
    pub seed: u64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceResult {
    pub curves: Vec<ConvergenceRow>,
    pub slopes: Vec<RegressionRow>,
}

fn convergence_result(ctx: &mut Context) -> Result<ConvergenceResult> {
    let m = ctx.config.replications();
    let mut curves = Vec::new();
    for cell in ctx.cells.clone() {
        let (mean_q, std_q, mean_abs_q) = if cell.status.is_feasible() {
            let stats = ctx.null_statistics(&cell, m)?;
            let abs: Vec<f64> = stats.iter().map(|v| v.abs()).collect();
            (Some(mean(&stats)), Some(std_dev(&stats)), Some(mean(&abs)))
        } else {
            (None, None, None)
        };
        curves.push(ConvergenceRow {
            q: cell.q,
            m: cell.m,
            k: cell.k,
            n: cell.n,
            mean_q,
            std_q,
            mean_abs_q,
            replications: m,
            seed: ctx.seed(),
            status: cell.status.clone(),
        });
        info!("convergence: cell {} of {}", cell.index + 1, ctx.cells.len());
    }

    // N is the innermost grid axis, so each (block, q, m, k) group is a run
    // of consecutive cells.
    let mut slopes = Vec::new();
    let mut start = 0;
    while start < ctx.cells.len() {
        let key = |c: &Cell| (c.block, c.q.to_bits(), c.m, c.k);
        let first = &ctx.cells[start];
        let end = start
            + ctx.cells[start..]
                .iter()
                .take_while(|c| key(c) == key(first))
                .count();
        let group = &curves[start..end];
        let blocked = ctx.cells[start..end].iter().find(|c| !c.status.is_feasible());
        let (fit, status) = match blocked {
            Some(c) => (None, c.status.clone()),
            None => {
                let ns: Vec<f64> = group.iter().map(|r| r.n as f64).collect();
                let y: Vec<f64> = group.iter().map(|r| r.mean_abs_q.expect("feasible")).collect();
                (Some(ols_slope_with_offset(&ns, &y)?), Status::Feasible)
            }
        };
        slopes.push(RegressionRow {
            q: first.q,
            m: first.m,
            k: first.k,
            fit,
            seed: ctx.seed(),
            status,
        });
        start = end;
    }
    Ok(ConvergenceResult { curves, slopes })
}

fn convergence_tables(r: &ConvergenceResult, prov: &Provenance) -> Vec<Table> {
    let mut curves = Table::new(
        "convergence.csv",
        &["q", "m", "k", "N", "mean_q", "std_q", "M", "seed", "mean_abs_q"],
    );
    for c in &r.curves {
        curves.push(
            vec![
                num(c.q),
                c.m.to_string(),
                c.k.to_string(),
                c.n.to_string(),
                opt_num(c.mean_q),
                opt_num(c.std_q),
                c.replications.to_string(),
                c.seed.to_string(),
                opt_num(c.mean_abs_q),
            ],
            &c.status,
            prov,
        );
    }
    let mut slopes = Table::new(
        "regression.csv",
        &["q", "m", "k", "beta", "intercept", "rse", "seed"],
    );
    for s in &r.slopes {
        slopes.push(
            vec![
                num(s.q),
                s.m.to_string(),
                s.k.to_string(),
                opt_num(s.fit.map(|f| f.slope)),
                opt_num(s.fit.map(|f| f.intercept)),
                opt_num(s.fit.map(|f| f.rse)),
                s.seed.to_string(),
            ],
            &s.status,
            prov,
        );
    }
    vec![curves, slopes]
}

/// Mean and spread of `Q` along the `N` axis of each block, and the
/// log-log slope of mean `|Q|` against `N` relative to root-N decay.
pub fn run_convergence(config: &ExperimentConfig, workers: usize) -> Result<ConvergenceResult> {
    expect_kind(config, ExperimentKind::Convergence)?;
    let mut ctx = Context::new(config, workers, None)?;
    convergence_result(&mut ctx)
}

// ---------------------------------------------------------------- consistency curves

/// Closed-form entropy and tail exponent of a source at estimator order `q`,
/// with the consistency conditions it implies.
fn source_info(
    source: Source,
    m: usize,
    q: f64,
    k: usize,
) -> tsallis_core::Result<(f64, ConsistencyReport)> {
    let identity = SymPDMatrix::identity(m);
    let (truth, tail) = match source {
        Source::Uniform => (0.0, f64::INFINITY),
        Source::Gaussian => (gg_tsallis_entropy(2.0, &identity, q)?, f64::INFINITY),
        Source::GeneralizedGaussian { s } => {
            GGParams::isotropic(m, s)?;
            (gg_tsallis_entropy(s, &identity, q)?, f64::INFINITY)
        }
        Source::Qgauss { q: q0 } => {
            let params = QGaussianParams::standard(m, q0)?;
            let integral = qgauss_power_integral(&params, q)?;
            let tail = if q0 > 1.0 { 2.0 / (q0 - 1.0) } else { f64::INFINITY };
            ((integral - 1.0) / (1.0 - q), tail)
        }
    };
    Ok((truth, check_consistency_conditions(tail, m, q, k)?))
}

fn draw_source(
    source: Source,
    m: usize,
    n: usize,
    rng: &mut RngStream,
) -> tsallis_core::Result<SampleMatrix> {
    match source {
        Source::Uniform => SampleMatrix::new(n, m, (0..n * m).map(|_| draw_uniform(rng)).collect()),
        Source::Gaussian => SampleMatrix::new(n, m, draw_standard_normal(rng, n * m)),
        Source::GeneralizedGaussian { s } => gg_sample(&GGParams::isotropic(m, s)?, n, rng),
        Source::Qgauss { q } => qgauss_sample(&QGaussianParams::standard(m, q)?, n, rng),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyRow {
    pub source: Source,
    pub q: f64,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub mean_h: Option<f64>,
    pub std_h: Option<f64>,
    pub truth: Option<f64>,
    pub report: Option<ConsistencyReport>,
    pub replications: usize,
    pub seed: u64,
    pub status: Status,
}

impl ConsistencyRow {
    pub fn bias(&self) -> Option<f64> {
        Some(self.mean_h? - self.truth?)
    }
}

fn consistency_rows(ctx: &mut Context) -> Result<Vec<ConsistencyRow>> {
    let reps = ctx.config.replications();
    let engine = ctx.engine();
    let mut rows = Vec::new();
    for cell in ctx.cells.clone() {
        let source = cell.source.expect("validated");
        let mut row = ConsistencyRow {
            source,
            q: cell.q,
            m: cell.m,
            k: cell.k,
            n: cell.n,
            mean_h: None,
            std_h: None,
            truth: None,
            report: None,
            replications: reps,
            seed: ctx.seed(),
            status: cell.status.clone(),
        };
        if cell.status.is_feasible() {
            let (truth, report) = source_info(source, cell.m, cell.q, cell.k)?;
            let h = ctx.exec.cell_values(cell.index, reps, |seed, stream| {
                let x = draw_source(source, cell.m, cell.n, &mut RngStream::new(seed, stream))?;
                Ok(tsallis_knn_estimate(&x, cell.k, cell.q, engine)?.h_hat)
            })?;
            row.mean_h = Some(mean(&h));
            row.std_h = Some(std_dev(&h));
            row.truth = Some(truth);
            row.report = Some(report);
        }
        rows.push(row);
        info!("consistency curves: cell {} of {}", cell.index + 1, ctx.cells.len());
    }
    Ok(rows)
}

fn consistency_table(rows: &[ConsistencyRow], prov: &Provenance) -> Table {
    let mut t = Table::new(
        "consistency.csv",
        &[
            "source",
            "q",
            "m",
            "k",
            "N",
            "mean_h",
            "std_h",
            "truth",
            "bias",
            "r_c",
            "condition_mean",
            "condition_mean_square",
            "q_range_ok",
            "M",
            "seed",
        ],
    );
    for r in rows {
        let flag = |f: fn(&ConsistencyReport) -> bool| r.report.map(|x| f(&x).to_string());
        t.push(
            vec![
                r.source.to_string(),
                num(r.q),
                r.m.to_string(),
                r.k.to_string(),
                r.n.to_string(),
                opt_num(r.mean_h),
                opt_num(r.std_h),
                opt_num(r.truth),
                opt_num(r.bias()),
                opt_num(r.report.map(|x| x.r_c)),
                flag(|x| x.condition_mean).unwrap_or_default(),
                flag(|x| x.condition_mean_square).unwrap_or_default(),
                flag(|x| x.q_range_ok).unwrap_or_default(),
                r.replications.to_string(),
                r.seed.to_string(),
            ],
            &r.status,
            prov,
        );
    }
    t
}

/// Mean and spread of the entropy estimate against the closed-form entropy
/// of the source, with the consistency conditions for its tail.
pub fn run_consistency_curves(
    config: &ExperimentConfig,
    workers: usize,
) -> Result<Vec<ConsistencyRow>> {
    expect_kind(config, ExperimentKind::ConsistencyCurves)?;
    let mut ctx = Context::new(config, workers, None)?;
    consistency_rows(&mut ctx)
}

// ---------------------------------------------------------------- distribution shape

#[derive(Debug, Clone, PartialEq)]
pub struct QqPoint {
    pub empirical: f64,
    /// `(Q − mean) / sd`.
    pub standardized: f64,
    pub normal: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeCell {
    pub q: f64,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub statistics: Vec<f64>,
    pub histogram: Option<Histogram>,
    pub qq: Vec<QqPoint>,
    pub status: Status,
}

/// Histogram of the first coordinate of draws from the standard q-Gaussian,
/// with the normal fit of the same draws.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub q: f64,
    pub m: usize,
    pub draws: usize,
    pub histogram: Option<Histogram>,
    pub fit_mean: Option<f64>,
    pub fit_sd: Option<f64>,
    pub status: Status,
}

impl DensityGrid {
    /// Log-density of the normal fit at `x`.
    pub fn normal_log_density(&self, x: f64) -> Option<f64> {
        let (mu, sd) = (self.fit_mean?, self.fit_sd?);
        let z = (x - mu) / sd;
        Some(-0.5 * (2.0 * std::f64::consts::PI).ln() - sd.ln() - 0.5 * z * z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeResult {
    pub cells: Vec<ShapeCell>,
    pub densities: Vec<DensityGrid>,
    pub seed: u64,
}

fn shape_result(ctx: &mut Context) -> Result<ShapeResult> {
    let reps = ctx.config.replications();
    let mut cells = Vec::new();
    for cell in ctx.cells.clone() {
        let mut out = ShapeCell {
            q: cell.q,
            m: cell.m,
            k: cell.k,
            n: cell.n,
            statistics: Vec::new(),
            histogram: None,
            qq: Vec::new(),
            status: cell.status.clone(),
        };
        if cell.status.is_feasible() {
            let stats = ctx.null_statistics(&cell, reps)?;
            let (mu, sd) = (mean(&stats), std_dev(&stats));
            out.histogram = Some(freedman_diaconis(&stats)?);
            out.qq = normal_qq_points(&stats)?
                .into_iter()
                .map(|(x, z)| QqPoint {
                    empirical: x,
                    standardized: (x - mu) / sd,
                    normal: z,
                })
                .collect();
            out.statistics = stats;
        }
        cells.push(out);
        info!("distribution shape: cell {} of {}", cell.index + 1, ctx.cells.len());
    }

    let draws = ctx.config.density_draws.expect("resolved");
    let mut seen = HashSet::new();
    let models: Vec<(f64, usize)> = ctx
        .cells
        .iter()
        .map(|c| (c.q, c.m))
        .filter(|(q, m)| seen.insert((q.to_bits(), *m)))
        .collect();
    let first_stream = ctx.exec.base_stream(ctx.cells.len())?;
    let seed = ctx.seed();
    let densities = ctx.exec.install(|| {
        use rayon::prelude::*;
        models
            .par_iter()
            .enumerate()
            .map(|(j, &(q, m))| density_grid(q, m, draws, seed, first_stream + j as u64))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(ShapeResult {
        cells,
        densities,
        seed,
    })
}

fn density_grid(q: f64, m: usize, draws: usize, seed: u64, stream: u64) -> Result<DensityGrid> {
    let mut grid = DensityGrid {
        q,
        m,
        draws,
        histogram: None,
        fit_mean: None,
        fit_sd: None,
        status: Status::Feasible,
    };
    let params = match QGaussianParams::standard(m, q) {
        Ok(p) => p,
        Err(e) => {
            grid.status = Status::Infeasible(e.to_string());
            return Ok(grid);
        }
    };
    let x = qgauss_sample(&params, draws, &mut RngStream::new(seed, stream))?;
    let first: Vec<f64> = x.rows().map(|r| r[0]).collect();
    grid.histogram = Some(freedman_diaconis(&first)?);
    grid.fit_mean = Some(mean(&first));
    grid.fit_sd = Some(std_dev(&first));
    Ok(grid)
}

fn shape_tables(r: &ShapeResult, prov: &Provenance) -> Vec<Table> {
    let seed = r.seed.to_string();
    let key = |c: &ShapeCell| vec![num(c.q), c.m.to_string(), c.k.to_string(), c.n.to_string()];

    let mut samples = Table::new(
        "shape_samples.csv",
        &["q", "m", "k", "N", "replication", "statistic", "seed"],
    );
    let mut hist = Table::new(
        "shape_hist.csv",
        &["q", "m", "k", "N", "bin", "lower", "upper", "count", "density", "seed"],
    );
    let mut qq = Table::new(
        "shape_qq.csv",
        &["q", "m", "k", "N", "index", "empirical", "standardized", "normal_quantile", "seed"],
    );
    for c in &r.cells {
        let with = |extra: Vec<String>| {
            let mut f = key(c);
            f.extend(extra);
            f.push(seed.clone());
            f
        };
        if !c.status.is_feasible() {
            samples.push(with(vec![String::new(); 2]), &c.status, prov);
            hist.push(with(vec![String::new(); 5]), &c.status, prov);
            qq.push(with(vec![String::new(); 4]), &c.status, prov);
            continue;
        }
        for (i, v) in c.statistics.iter().enumerate() {
            samples.push(with(vec![i.to_string(), num(*v)]), &c.status, prov);
        }
        let h = c.histogram.as_ref().expect("feasible");
        for (b, (count, e)) in h.counts.iter().zip(h.edges.windows(2)).enumerate() {
            let fields = vec![
                b.to_string(),
                num(e[0]),
                num(e[1]),
                count.to_string(),
                num(h.density[b]),
            ];
            hist.push(with(fields), &c.status, prov);
        }
        for (i, p) in c.qq.iter().enumerate() {
            let fields = vec![
                i.to_string(),
                num(p.empirical),
                num(p.standardized),
                num(p.normal),
            ];
            qq.push(with(fields), &c.status, prov);
        }
    }

    let mut density = Table::new(
        "shape_density.csv",
        &[
            "q",
            "m",
            "draws",
            "bin",
            "lower",
            "upper",
            "count",
            "density",
            "log_density",
            "normal_log_density",
            "seed",
        ],
    );
    for d in &r.densities {
        let with = |extra: Vec<String>| {
            let mut f = vec![num(d.q), d.m.to_string(), d.draws.to_string()];
            f.extend(extra);
            f.push(seed.clone());
            f
        };
        let Some(h) = &d.histogram else {
            density.push(with(vec![String::new(); 7]), &d.status, prov);
            continue;
        };
        for (b, (count, e)) in h.counts.iter().zip(h.edges.windows(2)).enumerate() {
            let centre = 0.5 * (e[0] + e[1]);
            let fields = vec![
                b.to_string(),
                num(e[0]),
                num(e[1]),
                count.to_string(),
                num(h.density[b]),
                num(h.density[b].ln()),
                opt_num(d.normal_log_density(centre)),
            ];
            density.push(with(fields), &d.status, prov);
        }
    }
    vec![samples, hist, qq, density]
}

/// Raw null statistics per cell with their histogram and normal Q-Q pairs,
/// plus model density grids for every distinct `(q, m)`.
pub fn run_distribution_shape(config: &ExperimentConfig, workers: usize) -> Result<ShapeResult> {
    expect_kind(config, ExperimentKind::DistributionShape)?;
    let mut ctx = Context::new(config, workers, None)?;
    shape_result(&mut ctx)
}

// ---------------------------------------------------------------- files

/// Runs any experiment kind and writes its CSV files into `out_dir`.
///
/// Finished cells are kept under `out_dir/.cache/<config hash>/`; with
/// `resume` set, a rerun recomputes only the cells that are missing there.
/// Output bytes depend only on the configuration.
pub fn run_experiment(
    config: &ExperimentConfig,
    out_dir: &Path,
    opts: RunOptions,
) -> Result<RunSummary> {
    let cache_root = opts.resume.then_some(out_dir);
    let mut ctx = Context::new(config, opts.workers, cache_root)?;
    info!(
        "{}: {} cells, {} replications, config {}",
        ctx.config.kind,
        ctx.cells.len(),
        ctx.config.replications(),
        ctx.prov.config_hash
    );
    let tables = match ctx.config.kind {
        ExperimentKind::CriticalValues => vec![critical_table(&critical_rows(&mut ctx)?, &ctx.prov)],
        ExperimentKind::NormalitySweep => {
            vec![normality_table(&normality_rows(&mut ctx)?, &ctx.prov)]
        }
        ExperimentKind::Convergence => convergence_tables(&convergence_result(&mut ctx)?, &ctx.prov),
        ExperimentKind::ConsistencyCurves => {
            vec![consistency_table(&consistency_rows(&mut ctx)?, &ctx.prov)]
        }
        ExperimentKind::DistributionShape => shape_tables(&shape_result(&mut ctx)?, &ctx.prov),
    };
    let mut files = Vec::new();
    for t in &tables {
        let path = out_dir.join(&t.name);
        write_atomic(&path, &t.to_csv()?)?;
        files.push(path);
    }
    Ok(RunSummary {
        files,
        cells: ctx.cells.len(),
        computed: ctx.exec.computed,
        cached: ctx.exec.cached,
        infeasible: ctx.cells.iter().filter(|c| !c.status.is_feasible()).count(),
    })
}
