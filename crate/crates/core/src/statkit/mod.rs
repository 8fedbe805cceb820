//! Statistics utilities for the simulation study: Shapiro–Wilk, empirical
//! quantiles, least squares, one-sample Kolmogorov–Smirnov, histograms and
//! normal Q-Q plotting positions.

mod shapiro;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::mathcore::std_normal_quantile;

pub use shapiro::{shapiro_wilk, ShapiroResult};

fn sorted_finite(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidInput("empty input".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("input contains non-finite values".into()));
    }
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    Ok(v)
}

/// Linear-interpolation quantile of an ascending slice (type 7): with
/// `h = level · (M − 1)` (0-based), `v[⌊h⌋] + (h − ⌊h⌋)(v[⌊h⌋ + 1] − v[⌊h⌋])`.
pub fn quantile_sorted(sorted: &[f64], level: f64) -> f64 {
    let h = level * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    match sorted.get(lo + 1) {
        Some(hi) if frac > 0.0 => sorted[lo] + frac * (hi - sorted[lo]),
        _ => sorted[lo],
    }
}

/// Empirical quantile at `level ∈ [0, 1]` by the type-7 rule: for sorted
/// `v_(1) ≤ … ≤ v_(M)` and `h = 1 + level (M − 1)`, interpolate linearly
/// between `v_(⌊h⌋)` and `v_(⌈h⌉)`.
pub fn empirical_quantile(values: &[f64], level: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&level) {
        return domain(format!("quantile level must lie in [0, 1], got {level}"));
    }
    Ok(quantile_sorted(&sorted_finite(values)?, level))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegressionFit {
    pub intercept: f64,
    pub slope: f64,
    /// Residual standard error with `n − 2` degrees of freedom.
    pub rse: f64,
}

/// Ordinary least squares of `y` on `x` with an intercept.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<RegressionFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let n = x.len();
    if n < 3 {
        return domain(format!("regression needs at least 3 points, got {n}"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("regression input contains non-finite values".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx <= 0.0 {
        return domain("regressor has no spread");
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - intercept - slope * a;
            r * r
        })
        .sum();
    Ok(RegressionFit {
        intercept,
        slope,
        rse: (sse / (nf - 2.0)).sqrt(),
    })
}

/// Fits `log ȳ_N = α + β log N − ½ log N`, i.e. regresses
/// `log ȳ_N + ½ log N` on `log N`. `β = 0` means root-N decay.
pub fn ols_slope_with_offset(ns: &[f64], mean_abs_q: &[f64]) -> Result<RegressionFit> {
    if ns.iter().chain(mean_abs_q).any(|v| !(*v > 0.0)) {
        return domain("sample sizes and mean statistics must be positive");
    }
    let mut distinct = ns.to_vec();
    distinct.sort_unstable_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return domain("regression needs at least 3 distinct sample sizes");
    }
    let x: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let y: Vec<f64> = ns
        .iter()
        .zip(mean_abs_q)
        .map(|(n, q)| q.ln() + 0.5 * n.ln())
        .collect();
    ols_fit(&x, &y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Kolmogorov distribution tail `P(K > λ) = 2 Σ_{j≥1} (−1)^{j−1} e^{−2 j² λ²}`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        // Series converges too slowly; the tail is 1 to double precision.
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS test against a continuous CDF, with Stephens' finite-sample
/// correction `λ = (√n + 0.12 + 0.11/√n) D`.
pub fn ks_one_sample(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    let v = sorted_finite(values)?;
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in v.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sn = n.sqrt();
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d),
        n: v.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `bins + 1` ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// `count / (n · width)`, so densities integrate to one.
    pub density: Vec<f64>,
}

/// Freedman–Diaconis histogram: width `2 IQR n^{−1/3}` over the data range,
/// bins closed on the left except the last, which is closed on both sides.
/// With zero IQR the rule falls back to `⌈log₂ n⌉ + 1` bins (Sturges).
pub fn freedman_diaconis(values: &[f64]) -> Result<Histogram> {
    let v = sorted_finite(values)?;
    let n = v.len();
    let (lo, hi) = (v[0], v[n - 1]);
    let iqr = quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25);
    let bins = if hi == lo {
        1
    } else if iqr > 0.0 {
        let width = 2.0 * iqr / (n as f64).cbrt();
        (((hi - lo) / width).ceil() as usize).clamp(1, 100_000)
    } else {
        (n as f64).log2().ceil() as usize + 1
    };
    let (lo, hi) = if hi == lo { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + i as f64 * width })
        .collect();
    let mut counts = vec![0usize; bins];
    for x in &v {
        let b = (((x - lo) / width).floor() as usize).min(bins - 1);
        counts[b] += 1;
    }
    let density = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(c, e)| *c as f64 / (n as f64 * (e[1] - e[0])))
        .collect();
    Ok(Histogram {
        edges,
        counts,
        density,
    })
}

/// Sorted data paired with the standard normal quantiles of the Blom plotting
/// positions `(i − 3/8)/(n + 1/4)`.
pub fn normal_qq_points(values: &[f64]) -> Result<Vec<(f64, f64)>> {
    let v = sorted_finite(values)?;
    let n = v.len() as f64;
    v.into_iter()
        .enumerate()
        .map(|(i, x)| Ok((x, std_normal_quantile((i as f64 + 0.625) / (n + 0.25))?)))
        .collect()
}

/// Pearson correlation coefficient.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return domain("correlation needs two equal-length series of length >= 2");
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateSample("a series has zero variance".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_examples() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(empirical_quantile(&v, 0.5).unwrap(), 5.5);
        assert!((empirical_quantile(&v, 0.95).unwrap() - 9.55).abs() < 1e-12);
        assert_eq!(empirical_quantile(&v, 0.0).unwrap(), 1.0);
        assert_eq!(empirical_quantile(&v, 1.0).unwrap(), 10.0);
        for level in [0.0, 0.3, 0.77, 1.0] {
            assert_eq!(empirical_quantile(&[4.2; 7], level).unwrap(), 4.2);
        }
        assert!(empirical_quantile(&[], 0.5).is_err());
        assert!(empirical_quantile(&v, 1.5).is_err());
    }

    #[test]
    fn quantile_monotone_and_equivariant() {
        let v = [3.1, -2.0, 0.4, 9.9, 5.5, 0.4, 7.0];
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=50 {
            let level = i as f64 / 50.0;
            let q = empirical_quantile(&v, level).unwrap();
            assert!(q >= prev);
            prev = q;
            let w: Vec<f64> = v.iter().map(|x| 2.0 * x + 1.0).collect();
            assert!((empirical_quantile(&w, level).unwrap() - (2.0 * q + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn ols_recovers_noiseless_line() {
        let x = [0.5, 1.0, 2.0, 4.5, 7.0];
        let y: Vec<f64> = x.iter().map(|v| -1.25 + 0.7 * v).collect();
        let fit = ols_fit(&x, &y).unwrap();
        assert!((fit.intercept + 1.25).abs() < 1e-10);
        assert!((fit.slope - 0.7).abs() < 1e-10);
        assert!(fit.rse < 1e-10);
    }

    #[test]
    fn ols_normal_equations_hold() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y = [2.1, 3.9, 6.2, 7.8, 10.1, 12.2];
        let fit = ols_fit(&x, &y).unwrap();
        let res: Vec<f64> = x.iter().zip(&y).map(|(a, b)| b - fit.intercept - fit.slope * a).collect();
        assert!(res.iter().sum::<f64>().abs() < 1e-10);
        assert!(res.iter().zip(&x).map(|(r, a)| r * a).sum::<f64>().abs() < 1e-10);
    }

    #[test]
    fn offset_regression_examples() {
        let ns = [500.0, 1000.0, 2000.0, 5000.0];
        let root: Vec<f64> = ns.iter().map(|n: &f64| n.powf(-0.5)).collect();
        assert!(ols_slope_with_offset(&ns, &root).unwrap().slope.abs() < 1e-10);
        let slower: Vec<f64> = ns.iter().map(|n: &f64| 3.0 * n.powf(-0.4)).collect();
        let fit = ols_slope_with_offset(&ns, &slower).unwrap();
        assert!((fit.slope - 0.1).abs() < 1e-10);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-10);
        assert!(ols_slope_with_offset(&ns, &[1.0, 0.0, 1.0, 1.0]).is_err());
        assert!(ols_slope_with_offset(&[10.0, 10.0, 20.0], &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn histogram_mass_is_one() {
        let v: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64 / 37.0).collect();
        let h = freedman_diaconis(&v).unwrap();
        let mass: f64 = h.density.iter().zip(h.edges.windows(2)).map(|(d, e)| d * (e[1] - e[0])).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        assert_eq!(h.counts.iter().sum::<usize>(), 1000);
        let flat = freedman_diaconis(&[2.0; 5]).unwrap();
        assert_eq!(flat.counts, vec![5]);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Reference values of the Kolmogorov distribution.
        assert!((kolmogorov_sf(1.0) - 0.269_999_671_677_355_5).abs() < 1e-12);
        assert!((kolmogorov_sf(1.358_098_8) - 0.05).abs() < 1e-6);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn ks_accepts_matching_law() {
        let v: Vec<f64> = (0..200).map(|i| (i as f64 + 0.5) / 200.0).collect();
        let r = ks_one_sample(&v, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((r.statistic - 0.0025).abs() < 1e-12);
        assert!(r.p_value > 0.99);
    }

    #[test]
    fn qq_points_pair_with_scores() {
        let pts = normal_qq_points(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(pts[0].0, 1.0);
        assert!(pts[1].1.abs() < 1e-15);
        assert!((pts[0].1 + pts[2].1).abs() < 1e-15);
    }
}
