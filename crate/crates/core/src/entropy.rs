//! k-nearest-neighbour Tsallis entropy estimator and the consistency-condition
//! checker.
//!
//! With `ρ_i` the distance from `X_i` to its k-th neighbour,
//! `ζ_i = (N − 1) C_k V_m ρ_i^m` and `C_k = [Γ(k)/Γ(k + 1 − q)]^{1/(1−q)}`,
//! the mean `Î = (1/N) Σ ζ_i^{1−q}` estimates `∫ f^q`, and the entropy
//! estimate is `ĥ = (1 − Î)/(q − 1)`.

use log::warn;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::knn::{knn_distances, Engine};
use crate::linalg::{ordered_sum, SampleMatrix};
use crate::mathcore::{draw_uniform, log_gamma_unchecked, log_unit_ball_volume, RngStream};

/// Magnitude of the opt-in duplicate jitter relative to the data diameter.
pub const JITTER_SCALE: f64 = 1e-9;

fn check_order(k: usize, q: f64) -> Result<()> {
    if k == 0 {
        return domain("neighbour order k must be at least 1");
    }
    if !(q > 0.0) || !q.is_finite() {
        return domain(format!("entropic order q must be positive, got {q}"));
    }
    if q == 1.0 {
        return domain("the estimator is undefined at q = 1");
    }
    if q >= k as f64 + 1.0 {
        return domain(format!(
            "q = {q} must be below k + 1 = {} (pole of Gamma(k + 1 - q))",
            k + 1
        ));
    }
    Ok(())
}

fn log_c_k(k: usize, q: f64) -> f64 {
    (log_gamma_unchecked(k as f64) - log_gamma_unchecked(k as f64 + 1.0 - q)) / (1.0 - q)
}

/// `C_k = [Γ(k)/Γ(k + 1 − q)]^{1/(1−q)}`.
pub fn c_k(k: usize, q: f64) -> Result<f64> {
    check_order(k, q)?;
    Ok(log_c_k(k, q).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyEstimate {
    /// Estimate of `∫ f^q`.
    pub i_hat: f64,
    /// Tsallis entropy estimate `(1 − i_hat)/(q − 1)`.
    pub h_hat: f64,
    pub q: f64,
    pub k: usize,
    pub n: usize,
    pub m: usize,
}

/// What to do when a zero k-th neighbour distance makes `ζ^{1−q}` infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    #[default]
    Error,
    /// Perturb every coordinate uniformly by at most `JITTER_SCALE` times the
    /// bounding-box diagonal, using the given seed, and retry once.
    Jitter { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EstimatorOptions {
    pub engine: Engine,
    pub duplicates: DuplicatePolicy,
}

/// Estimate from precomputed k-th neighbour distances of `N` points in R^m.
pub fn estimate_from_distances(kth: &[f64], m: usize, k: usize, q: f64) -> Result<EntropyEstimate> {
    check_order(k, q)?;
    let n = kth.len();
    if n <= k {
        return domain(format!("need N > k, got N = {n}, k = {k}"));
    }
    let log_scale = ((n - 1) as f64).ln() + log_c_k(k, q) + log_unit_ball_volume(m)?;
    let mf = m as f64;
    let mut terms = Vec::with_capacity(n);
    for (i, &rho) in kth.iter().enumerate() {
        if rho == 0.0 {
            if q > 1.0 {
                return Err(Error::DegenerateSample(format!(
                    "point {i} has a zero k-th neighbour distance (duplicate points) with q > 1"
                )));
            }
            terms.push(0.0);
            continue;
        }
        terms.push(((1.0 - q) * (log_scale + mf * rho.ln())).exp());
    }
    let i_hat = ordered_sum(&mut terms) / n as f64;
    Ok(EntropyEstimate {
        i_hat,
        h_hat: (1.0 - i_hat) / (q - 1.0),
        q,
        k,
        n,
        m,
    })
}

pub fn tsallis_knn_estimate(
    x: &SampleMatrix,
    k: usize,
    q: f64,
    engine: Engine,
) -> Result<EntropyEstimate> {
    tsallis_knn_estimate_with(
        x,
        k,
        q,
        EstimatorOptions {
            engine,
            ..Default::default()
        },
    )
}

pub fn tsallis_knn_estimate_with(
    x: &SampleMatrix,
    k: usize,
    q: f64,
    opts: EstimatorOptions,
) -> Result<EntropyEstimate> {
    check_order(k, q)?;
    let dist = knn_distances(x, k, opts.engine)?;
    match estimate_from_distances(&dist.kth(), x.ncols(), k, q) {
        Err(Error::DegenerateSample(msg)) => match opts.duplicates {
            DuplicatePolicy::Error => Err(Error::DegenerateSample(msg)),
            DuplicatePolicy::Jitter { seed } => {
                let jittered = jitter(x, seed)?;
                warn!("{msg}; retrying with jitter of {JITTER_SCALE:e} x data diameter");
                let dist = knn_distances(&jittered, k, opts.engine)?;
                estimate_from_distances(&dist.kth(), x.ncols(), k, q)
            }
        },
        other => other,
    }
}

fn jitter(x: &SampleMatrix, seed: u64) -> Result<SampleMatrix> {
    let m = x.ncols();
    let mut diag2 = 0.0;
    for axis in 0..m {
        let (lo, hi) = x
            .rows()
            .map(|r| r[axis])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        diag2 += (hi - lo) * (hi - lo);
    }
    let amplitude = JITTER_SCALE * diag2.sqrt();
    if amplitude == 0.0 {
        return Err(Error::DegenerateSample("all points coincide; jitter has no scale".into()));
    }
    let mut rng = RngStream::new(seed, 0);
    let data = x
        .as_slice()
        .iter()
        .map(|v| v + amplitude * (2.0 * draw_uniform(&mut rng) - 1.0))
        .collect();
    SampleMatrix::new(x.nrows(), m, data)
}

/// Result of evaluating the strict-inequality consistency conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistencyReport {
    /// Critical moment `r_c = β − m`, `+∞` for compact support.
    pub r_c: f64,
    /// Asymptotic unbiasedness: `r_c > m(1 − q)/q`.
    pub condition_mean: bool,
    /// Mean-square consistency: `q > 1/2` and `r_c > 2m(1 − q)/(2q − 1)`.
    pub condition_mean_square: bool,
    /// `q ∈ (0, 1)`, or `q ∈ (1, (k + 1)/2)` where the same results carry over.
    pub q_range_ok: bool,
    pub mean_bound: f64,
    pub mean_square_bound: f64,
}

/// `tail_exponent` is `β` in a density tail `f(x) ~ ‖x‖^{−β}` (`+∞` for
/// compactly supported densities).
pub fn check_consistency_conditions(
    tail_exponent: f64,
    m: usize,
    q: f64,
    k: usize,
) -> Result<ConsistencyReport> {
    if m == 0 || k == 0 {
        return domain("dimension and neighbour order must be at least 1");
    }
    if !(q > 0.0) || !q.is_finite() {
        return domain(format!("entropic order q must be positive, got {q}"));
    }
    let mf = m as f64;
    if tail_exponent.is_nan() || tail_exponent <= mf {
        return domain(format!(
            "tail exponent must exceed the dimension m = {m}, got {tail_exponent}"
        ));
    }
    let r_c = tail_exponent - mf;
    let mean_bound = mf * (1.0 - q) / q;
    let mean_square_bound = if q > 0.5 {
        2.0 * mf * (1.0 - q) / (2.0 * q - 1.0)
    } else {
        f64::INFINITY
    };
    Ok(ConsistencyReport {
        r_c,
        condition_mean: r_c > mean_bound,
        condition_mean_square: q > 0.5 && r_c > mean_square_bound,
        q_range_ok: (q < 1.0) || (q > 1.0 && q < (k as f64 + 1.0) / 2.0),
        mean_bound,
        mean_square_bound,
    })
}
