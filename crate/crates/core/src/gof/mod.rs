//! Tsallis goodness-of-fit statistics and the one-sided test decision.
//!
//! `Q = H_q^upper(Σ̂_N) − ĥ`, where `H_q^upper` is the closed-form Tsallis
//! entropy of the null q-Gaussian whose covariance equals the sample
//! covariance and `ĥ` is the k-NN estimate. `T1` is the heavy-tailed null
//! (`1 < q < 1 + 2/(m + 2)`, so that a covariance exists), `T2` the compact one
//! (`0 < q < 1`). Large values of `Q` are evidence against the null.

mod table;

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{
    covariance_factor, qgauss_sample, qgauss_tsallis_entropy, QGaussianParams,
};
use crate::entropy::{tsallis_knn_estimate, EntropyEstimate};
use crate::error::{domain, Error, Result};
use crate::knn::Engine;
use crate::linalg::{sample_mean_cov, SampleMatrix, SymPDMatrix};
use crate::mathcore::RngStream;
use crate::statkit::empirical_quantile;

pub use crate::distributions::NullFamily;
pub use table::{CriticalValueRow, CriticalValueTable};

/// How the maximum-entropy term is formed from the sample covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpperForm {
    /// Tsallis entropy of the covariance-matched null member.
    #[default]
    CovarianceMatched,
    /// `½ log det Σ̂ + H_q` of the identity-covariance member. Kept for
    /// diagnostics only: it mixes a Shannon-style additive term into a
    /// Tsallis entropy and does not vanish under the null.
    AdditiveLogDet,
}

/// Checks that `q` is a feasible order for `family` in dimension `m`.
pub fn check_feasible(family: NullFamily, m: usize, q: f64) -> Result<()> {
    if m == 0 {
        return domain("dimension must be at least 1");
    }
    match family {
        NullFamily::T2 if q > 0.0 && q < 1.0 => Ok(()),
        NullFamily::T2 => Err(Error::Infeasible(format!(
            "T2 requires 0 < q < 1, got q = {q}"
        ))),
        NullFamily::T1 => {
            let bound = 1.0 + 2.0 / (m as f64 + 2.0);
            if q > 1.0 && q < bound {
                Ok(())
            } else {
                Err(Error::Infeasible(format!(
                    "T1 requires 1 < q < 1 + 2/(m + 2) = {bound} for m = {m} \
                     (finite covariance), got q = {q}"
                )))
            }
        }
    }
}

/// Tsallis entropy of the `family` member whose covariance is `sample_cov`.
pub fn h_q_upper(sample_cov: &SymPDMatrix, q: f64, family: NullFamily) -> Result<f64> {
    let m = sample_cov.dim();
    check_feasible(family, m, q)?;
    let params = QGaussianParams::from_covariance(q, vec![0.0; m], sample_cov)?;
    qgauss_tsallis_entropy(&params)
}

/// The additive `½ log det Σ̂ + H_q(identity covariance)` form.
pub fn h_q_upper_additive(sample_cov: &SymPDMatrix, q: f64, family: NullFamily) -> Result<f64> {
    let m = sample_cov.dim();
    check_feasible(family, m, q)?;
    let unit = QGaussianParams::from_covariance(q, vec![0.0; m], &SymPDMatrix::identity(m))?;
    Ok(0.5 * sample_cov.log_det() + qgauss_tsallis_entropy(&unit)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub family: NullFamily,
    pub q: f64,
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    pub h_upper: f64,
    pub h_hat: f64,
    pub i_hat: f64,
    pub critical_value: Option<f64>,
    pub alpha: Option<f64>,
    pub reject: Option<bool>,
}

impl TestResult {
    /// Attaches a critical value; the test rejects when `Q > critical`.
    pub fn decide(mut self, critical: f64, alpha: f64) -> Self {
        self.critical_value = Some(critical);
        self.alpha = Some(alpha);
        self.reject = Some(self.statistic > critical);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StatisticOptions {
    pub engine: Engine,
    pub upper: UpperForm,
}

pub fn q_statistic(x: &SampleMatrix, k: usize, q: f64, family: NullFamily) -> Result<TestResult> {
    q_statistic_with(x, k, q, family, StatisticOptions::default())
}

pub fn q_statistic_with(
    x: &SampleMatrix,
    k: usize,
    q: f64,
    family: NullFamily,
    opts: StatisticOptions,
) -> Result<TestResult> {
    check_feasible(family, x.ncols(), q)?;
    let moments = sample_mean_cov(x);
    let cov = moments.cov.to_pd().map_err(|e| {
        Error::DegenerateSample(format!("sample covariance is not positive definite: {e}"))
    })?;
    let h_upper = match opts.upper {
        UpperForm::CovarianceMatched => h_q_upper(&cov, q, family)?,
        UpperForm::AdditiveLogDet => h_q_upper_additive(&cov, q, family)?,
    };
    let EntropyEstimate { i_hat, h_hat, .. } = tsallis_knn_estimate(x, k, q, opts.engine)?;
    Ok(TestResult {
        statistic: h_upper - h_hat,
        family,
        q,
        k,
        n: x.nrows(),
        m: x.ncols(),
        h_upper,
        h_hat,
        i_hat,
        critical_value: None,
        alpha: None,
        reject: None,
    })
}

/// One cell of null simulation: `(N, m, q, k)` under `family` with the given
/// shape matrix, `M` replications on streams `first_stream + r`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDesign {
    pub family: NullFamily,
    pub q: f64,
    pub k: usize,
    pub n: usize,
    pub shape: SymPDMatrix,
    pub opts: StatisticOptions,
}

impl NullDesign {
    /// Standard null with identity shape matrix, as used for tables.
    pub fn standard(family: NullFamily, m: usize, q: f64, k: usize, n: usize) -> Self {
        Self {
            family,
            q,
            k,
            n,
            shape: SymPDMatrix::identity(m),
            opts: StatisticOptions::default(),
        }
    }

    /// Statistic of one null replication on stream `(seed, stream)`.
    pub fn replicate(&self, seed: u64, stream: u64) -> Result<f64> {
        let m = self.shape.dim();
        let params = QGaussianParams::new(self.q, vec![0.0; m], self.shape.clone())?;
        let x = qgauss_sample(&params, self.n, &mut RngStream::new(seed, stream))?;
        Ok(q_statistic_with(&x, self.k, self.q, self.family, self.opts)?.statistic)
    }

    /// `replications` null statistics in replication order. Runs on the
    /// current rayon pool; the result does not depend on its size.
    pub fn simulate(&self, replications: usize, seed: u64, first_stream: u64) -> Result<Vec<f64>> {
        check_feasible(self.family, self.shape.dim(), self.q)?;
        (0..replications as u64)
            .into_par_iter()
            .map(|r| self.replicate(seed, first_stream + r))
            .collect()
    }
}

/// Upper `α` point of simulated null statistics: the `1 − α` type-7 quantile.
pub fn critical_value(null_statistics: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    empirical_quantile(null_statistics, 1.0 - alpha)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return domain(format!("significance level must lie in (0, 0.5], got {alpha}"));
    }
    Ok(())
}

/// Where the critical value of [`run_test`] comes from.
#[derive(Debug, Clone, Copy)]
pub enum CriticalSource<'a> {
    /// Exact `(q, m, k, N, α)` lookup; a miss is a configuration error.
    Table(&'a CriticalValueTable),
    /// Parametric bootstrap: `replications` samples from the null member
    /// matched to the observed covariance, on streams `0..replications` of
    /// `seed`.
    Simulate { replications: usize, seed: u64 },
    /// Table lookup, falling back to simulation on a miss.
    TableOrSimulate {
        table: &'a CriticalValueTable,
        replications: usize,
        seed: u64,
    },
}

pub fn run_test(
    x: &SampleMatrix,
    k: usize,
    q: f64,
    family: NullFamily,
    alpha: f64,
    source: CriticalSource<'_>,
) -> Result<TestResult> {
    run_test_with(x, k, q, family, alpha, source, StatisticOptions::default())
}

pub fn run_test_with(
    x: &SampleMatrix,
    k: usize,
    q: f64,
    family: NullFamily,
    alpha: f64,
    source: CriticalSource<'_>,
    opts: StatisticOptions,
) -> Result<TestResult> {
    check_alpha(alpha)?;
    let result = q_statistic_with(x, k, q, family, opts)?;
    let lookup = |table: &CriticalValueTable| table.lookup(q, x.ncols(), k, x.nrows(), alpha);
    let simulate = |replications: usize, seed: u64| -> Result<f64> {
        if replications < 2 {
            return domain("null simulation needs at least 2 replications");
        }
        let cov = sample_mean_cov(x).cov.to_pd()?;
        let shape = cov.scaled(1.0 / covariance_factor(x.ncols(), q)?)?;
        let design = NullDesign {
            family,
            q,
            k,
            n: x.nrows(),
            shape,
            opts,
        };
        critical_value(&design.simulate(replications, seed, 0)?, alpha)
    };
    let crit = match source {
        CriticalSource::Table(table) => lookup(table).ok_or_else(|| {
            Error::Config(format!(
                "no critical value for q = {q}, m = {}, k = {k}, N = {}, alpha = {alpha} \
                 and no simulation budget",
                x.ncols(),
                x.nrows()
            ))
        })?,
        CriticalSource::Simulate { replications, seed } => simulate(replications, seed)?,
        CriticalSource::TableOrSimulate {
            table,
            replications,
            seed,
        } => match lookup(table) {
            Some(c) => c,
            None => simulate(replications, seed)?,
        },
    };
    Ok(result.decide(crit, alpha))
}
