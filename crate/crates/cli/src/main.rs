//! `tsallis`: sampling, k-NN Tsallis entropy estimation, goodness-of-fit
//! testing and the Monte Carlo experiments, from the command line.
//!
//! Exit status is 0 on success, 1 for domain or feasibility errors and 2 for
//! I/O or configuration errors. Failures print a JSON object on stderr.

mod error;
mod input;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use tsallis_core::distributions::{gg_sample, qgauss_sample, GGParams, QGaussianParams};
use tsallis_core::entropy::{tsallis_knn_estimate_with, DuplicatePolicy, EstimatorOptions};
use tsallis_core::gof::{run_test, CriticalSource, CriticalValueTable, NullFamily};
use tsallis_core::knn::Engine;
use tsallis_core::{RngStream, SampleMatrix, SymPDMatrix};
use tsallis_harness::{run_experiment, write_atomic, ExperimentConfig, ExperimentKind, RunOptions};

use error::CliError;

/// Environment variable holding the default experiment worker count.
const WORKERS_ENV: &str = "TSALLIS_WORKERS";

#[derive(Parser)]
#[command(name = "tsallis", version, about = "Tsallis-entropy goodness-of-fit toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a sample from a q-Gaussian or generalized Gaussian law.
    Sample(SampleArgs),
    /// k-NN estimate of the Tsallis entropy of a sample.
    Entropy(EntropyArgs),
    /// One-sided q-Gaussian goodness-of-fit test.
    Gof(GofArgs),
    /// Tables of simulated null critical values.
    CriticalValues(ExperimentArgs),
    /// Shapiro-Wilk normality of the null statistic.
    NormalitySweep(ExperimentArgs),
    /// Log-log decay of the null statistic with N.
    Convergence(ExperimentArgs),
    /// Histograms, Q-Q and density data of the null statistic.
    Shape(ExperimentArgs),
    /// Estimator bias and spread against closed-form entropies.
    Consistency(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleFamily {
    Gg,
    Qgauss,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Tree,
    Brute,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Tree => Engine::Tree,
            EngineArg::Brute => Engine::BruteForce,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    T1,
    T2,
}

impl From<FamilyArg> for NullFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::T1 => NullFamily::T1,
            FamilyArg::T2 => NullFamily::T2,
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    family: SampleFamily,
    /// Dimension.
    #[arg(long)]
    m: usize,
    /// Entropic index of a q-Gaussian.
    #[arg(long, required_if_eq("family", "qgauss"), conflicts_with = "s")]
    q: Option<f64>,
    /// Shape exponent of a generalized Gaussian.
    #[arg(long, required_if_eq("family", "gg"))]
    s: Option<f64>,
    /// `identity` or a CSV file holding the m x m shape matrix.
    #[arg(long, default_value = "identity")]
    sigma: String,
    /// Location, as comma-separated values; zero by default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Option<Vec<f64>>,
    /// Number of draws.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EntropyArgs {
    /// Sample CSV, one point per row.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    q: f64,
    #[arg(long, value_enum, default_value = "tree")]
    engine: EngineArg,
    /// Break duplicate points with a tiny seeded jitter instead of failing.
    #[arg(long)]
    jitter_seed: Option<u64>,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("critical").required(true).multiple(true).args(["table", "simulate"]))]
struct GofArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Null family; inferred from q when omitted.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long)]
    q: f64,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Critical-value table CSV (q, m, k, N, alpha, crit).
    #[arg(long)]
    table: Option<PathBuf>,
    /// Null replications for an on-the-fly critical value; with --table,
    /// used only on a table miss.
    #[arg(long)]
    simulate: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Output directory; overrides `output` in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recompute every cell instead of reusing cached ones.
    #[arg(long)]
    no_resume: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Sample(a) => sample(a),
        Command::Entropy(a) => entropy(a),
        Command::Gof(a) => gof(a),
        Command::CriticalValues(a) => experiment(a, ExperimentKind::CriticalValues),
        Command::NormalitySweep(a) => experiment(a, ExperimentKind::NormalitySweep),
        Command::Convergence(a) => experiment(a, ExperimentKind::Convergence),
        Command::Shape(a) => experiment(a, ExperimentKind::DistributionShape),
        Command::Consistency(a) => experiment(a, ExperimentKind::ConsistencyCurves),
    }
}

fn print_json(value: &serde_json::Value) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{value:#}").map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn sample(a: SampleArgs) -> Result<(), CliError> {
    let shape = if a.sigma == "identity" {
        SymPDMatrix::identity(a.m)
    } else {
        input::read_shape(Path::new(&a.sigma), a.m)?
    };
    let mu = a.mu.unwrap_or_else(|| vec![0.0; a.m]);
    let mut rng = RngStream::new(a.seed, 0);
    let x = match a.family {
        SampleFamily::Qgauss => {
            let q = a.q.expect("required by clap");
            qgauss_sample(&QGaussianParams::new(q, mu, shape)?, a.n, &mut rng)?
        }
        SampleFamily::Gg => {
            let s = a.s.expect("required by clap");
            gg_sample(&GGParams::new(s, mu, shape)?, a.n, &mut rng)?
        }
    };
    let bytes = sample_csv(&x);
    match a.out {
        Some(path) => write_atomic(&path, &bytes)?,
        None => std::io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?,
    }
    Ok(())
}

fn sample_csv(x: &SampleMatrix) -> Vec<u8> {
    let mut text = (1..=x.ncols())
        .map(|j| format!("x{j}"))
        .collect::<Vec<_>>()
        .join(",");
    text.push('\n');
    for row in x.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        text.push_str(&fields.join(","));
        text.push('\n');
    }
    text.into_bytes()
}

fn entropy(a: EntropyArgs) -> Result<(), CliError> {
    let x = input::read_sample(&a.input)?;
    let opts = EstimatorOptions {
        engine: a.engine.into(),
        duplicates: a
            .jitter_seed
            .map_or(DuplicatePolicy::Error, |seed| DuplicatePolicy::Jitter { seed }),
    };
    let e = tsallis_knn_estimate_with(&x, a.k, a.q, opts)?;
    print_json(&json!({
        "i_hat": e.i_hat,
        "h_hat": e.h_hat,
        "q": e.q,
        "k": e.k,
        "N": e.n,
        "m": e.m,
    }))
}

fn gof(a: GofArgs) -> Result<(), CliError> {
    let x = input::read_sample(&a.input)?;
    let family = match a.family {
        Some(f) => f.into(),
        None => NullFamily::for_q(a.q).ok_or_else(|| {
            tsallis_core::Error::Infeasible(format!(
                "no null family admits q = {}: T1 needs 1 < q < 3, T2 needs 0 < q < 1",
                a.q
            ))
        })?,
    };
    let table = match &a.table {
        Some(path) => {
            let file = std::fs::File::open(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Some(CriticalValueTable::read_csv(file).map_err(|e| {
                CliError::Input(format!("{}: {e}", path.display()))
            })?)
        }
        None => None,
    };
    let source = match (&table, a.simulate) {
        (Some(table), None) => CriticalSource::Table(table),
        (Some(table), Some(replications)) => CriticalSource::TableOrSimulate {
            table,
            replications,
            seed: a.seed,
        },
        (None, Some(replications)) => CriticalSource::Simulate {
            replications,
            seed: a.seed,
        },
        (None, None) => unreachable!("clap requires --table or --simulate"),
    };
    let result = run_test(&x, a.k, a.q, family, a.alpha, source)?;
    print_json(&serde_json::to_value(result).expect("TestResult serialises"))
}

fn experiment(a: ExperimentArgs, kind: ExperimentKind) -> Result<(), CliError> {
    let config = ExperimentConfig::from_path(&a.config)?;
    if config.kind != kind {
        return Err(CliError::Input(format!(
            "{}: kind = \"{}\" does not match subcommand `{kind}`",
            a.config.display(),
            config.kind
        )));
    }
    let workers = a.workers.unwrap_or_else(|| RunOptions::default().workers);
    let out_dir = a
        .out
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(kind.to_string()));
    let summary = run_experiment(
        &config,
        &out_dir,
        RunOptions {
            workers,
            resume: !a.no_resume,
        },
    )?;
    print_json(&json!({
        "kind": kind.to_string(),
        "output": out_dir,
        "files": summary.files,
        "cells": summary.cells,
        "computed": summary.computed,
        "cached": summary.cached,
        "infeasible": summary.infeasible,
    }))
}
