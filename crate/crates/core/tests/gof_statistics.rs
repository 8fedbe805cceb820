//! The goodness-of-fit statistic under the null and under alternatives, and
//! the calibration of the simulated test.

use tsallis_core::distributions::{qgauss_q_integral, qgauss_sample, QGaussianParams};
use tsallis_core::gof::*;
use tsallis_core::mathcore::{draw_standard_normal, draw_uniform};
use tsallis_core::{Error, RngStream, SampleMatrix, SymPDMatrix};

fn null_sample(m: usize, q: f64, n: usize, seed: u64, stream: u64) -> SampleMatrix {
    let p = QGaussianParams::standard(m, q).unwrap();
    qgauss_sample(&p, n, &mut RngStream::new(seed, stream)).unwrap()
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn upper_entropy_gaussian_limit() {
    let shannon = 0.5 * ((2.0 * std::f64::consts::PI).ln() + 1.0);
    let one = SymPDMatrix::identity(1);
    let t1 = h_q_upper(&one, 1.0 + 1e-4, NullFamily::T1).unwrap();
    let t2 = h_q_upper(&one, 1.0 - 1e-4, NullFamily::T2).unwrap();
    assert!((t1 - shannon).abs() < 1e-3);
    assert!((t2 - shannon).abs() < 1e-3);
}

#[test]
fn upper_entropy_scaling_law() {
    let c: f64 = 2.0;
    let cov = SymPDMatrix::new(2, vec![1.5, 0.3, 0.3, 0.8]).unwrap();
    for (q, family) in [(1.2, NullFamily::T1), (0.6, NullFamily::T2)] {
        let base = QGaussianParams::from_covariance(q, vec![0.0; 2], &cov).unwrap();
        let i_base = qgauss_q_integral(&base).unwrap();
        let want = (1.0 - i_base * c.powf(2.0 * (1.0 - q))) / (q - 1.0);
        let got = h_q_upper(&cov.scaled(c * c).unwrap(), q, family).unwrap();
        assert!((got - want).abs() < 1e-12, "q={q}: {got} vs {want}");
    }
}

#[test]
fn infeasible_orders() {
    let two = SymPDMatrix::identity(2);
    assert!(matches!(h_q_upper(&two, 2.5, NullFamily::T1), Err(Error::Infeasible(_))));
    assert!(matches!(h_q_upper(&two, 1.5, NullFamily::T1), Err(Error::Infeasible(_))));
    assert!(matches!(h_q_upper(&two, 0.5, NullFamily::T1), Err(Error::Infeasible(_))));
    assert!(matches!(h_q_upper(&two, 1.2, NullFamily::T2), Err(Error::Infeasible(_))));
    let msg = h_q_upper(&two, 2.5, NullFamily::T1).unwrap_err().to_string();
    assert!(msg.contains("1 + 2/(m + 2)"), "{msg}");
}

#[test]
fn null_mean_is_near_zero() {
    let q: Vec<f64> = (0..100)
        .map(|s| {
            let x = null_sample(2, 1.2, 2000, 500 + s, 0);
            q_statistic(&x, 1, 1.2, NullFamily::T1).unwrap().statistic
        })
        .collect();
    let (mean, _) = mean_se(&q);
    assert!(mean.abs() < 0.02, "mean Q {mean}");
}

#[test]
fn uniform_alternative_is_detected() {
    let null: Vec<f64> = (0..100)
        .map(|s| {
            let x = null_sample(2, 1.2, 2000, 600 + s, 0);
            q_statistic(&x, 1, 1.2, NullFamily::T1).unwrap().statistic
        })
        .collect();
    let (_, se_null) = mean_se(&null);
    let alt: Vec<f64> = (0..100)
        .map(|s| {
            let mut rng = RngStream::new(700 + s, 0);
            let data = (0..4000).map(|_| draw_uniform(&mut rng)).collect();
            let x = SampleMatrix::new(2000, 2, data).unwrap();
            q_statistic(&x, 1, 1.2, NullFamily::T1).unwrap().statistic
        })
        .collect();
    let (mean_alt, _) = mean_se(&alt);
    assert!(mean_alt > 3.0 * se_null, "alt mean {mean_alt}, null se {se_null}");
}

#[test]
fn affine_change_is_small_against_null_noise() {
    let mut base = Vec::new();
    let mut diffs = Vec::new();
    for s in 0..100 {
        let x = null_sample(2, 1.2, 2000, 800 + s, 0);
        let y = x.affine(1.5, &[4.0, -3.0]).unwrap();
        let qx = q_statistic(&x, 1, 1.2, NullFamily::T1).unwrap().statistic;
        let qy = q_statistic(&y, 1, 1.2, NullFamily::T1).unwrap().statistic;
        base.push(qx);
        diffs.push((qy - qx).abs());
    }
    let (_, se) = mean_se(&base);
    let (mean_diff, _) = mean_se(&diffs);
    assert!(mean_diff < 2.0 * se, "mean |dQ| {mean_diff}, null se {se}");
}

#[test]
fn permutation_invariance() {
    let x = null_sample(2, 0.6, 800, 9, 0);
    let mut rows: Vec<Vec<f64>> = x.rows().map(<[f64]>::to_vec).collect();
    rows.rotate_left(123);
    rows.swap(0, 500);
    let y = SampleMatrix::from_rows(&rows).unwrap();
    let a = q_statistic(&x, 2, 0.6, NullFamily::T2).unwrap();
    let b = q_statistic(&y, 2, 0.6, NullFamily::T2).unwrap();
    assert_eq!(a.statistic, b.statistic);
}

#[test]
fn decision_rule() {
    let x = null_sample(1, 1.3, 200, 10, 0);
    let r = q_statistic(&x, 1, 1.3, NullFamily::T1).unwrap();
    assert_eq!(r.decide(r.statistic + 1e-3, 0.05).reject, Some(false));
    assert_eq!(r.decide(r.statistic, 0.05).reject, Some(false));
    assert_eq!(r.decide(r.statistic - 1e-3, 0.05).reject, Some(true));
    let mut last = false;
    for i in 0..50 {
        let crit = 0.5 - 0.02 * i as f64;
        let now = r.decide(crit, 0.05).reject.unwrap();
        assert!(now || !last, "reject must be monotone in Q - crit");
        last = now;
    }
}

#[test]
fn table_miss_is_configuration_error() {
    let x = null_sample(2, 1.2, 100, 11, 0);
    let empty = CriticalValueTable::default();
    let r = run_test(&x, 1, 1.2, NullFamily::T1, 0.05, CriticalSource::Table(&empty));
    assert!(matches!(r, Err(Error::Config(_))));
    let table = CriticalValueTable::new(vec![CriticalValueRow {
        q: 1.2,
        m: 2,
        k: 1,
        n: 100,
        alpha: 0.05,
        crit: 10.0,
        replications: 200,
        seed: 0,
    }])
    .unwrap();
    let r = run_test(&x, 1, 1.2, NullFamily::T1, 0.05, CriticalSource::Table(&table)).unwrap();
    assert_eq!(r.critical_value, Some(10.0));
    assert_eq!(r.reject, Some(false));
    assert!(run_test(&x, 1, 1.2, NullFamily::T1, 0.7, CriticalSource::Table(&table)).is_err());
}

#[test]
fn null_mean_shrinks_with_n() {
    let sizes = [500, 1000, 2000, 4000];
    let stats: Vec<(f64, f64)> = sizes
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let q: Vec<f64> = (0..60)
                .map(|s| {
                    let x = null_sample(1, 1.2, n, 900 + s, j as u64);
                    q_statistic(&x, 1, 1.2, NullFamily::T1).unwrap().statistic
                })
                .collect();
            let (mean, se) = mean_se(&q);
            (mean.abs(), se)
        })
        .collect();
    for w in stats.windows(2) {
        let band = 2.0 * (w[0].1 * w[0].1 + w[1].1 * w[1].1).sqrt();
        assert!(w[1].0 <= w[0].0 + band, "{stats:?}");
    }
}

#[test]
fn simulated_test_has_nominal_level() {
    let trials = 500;
    let mut rejected = 0;
    for t in 0..trials {
        let x = null_sample(1, 1.2, 200, 2024, t);
        let r = run_test(
            &x,
            1,
            1.2,
            NullFamily::T1,
            0.05,
            CriticalSource::Simulate {
                replications: 1000,
                seed: 10_000 + t,
            },
        )
        .unwrap();
        rejected += r.reject.unwrap() as usize;
    }
    let rate = rejected as f64 / trials as f64;
    assert!((rate - 0.05).abs() <= 0.02, "rejection rate {rate}");
}

/// Gaussian data have a smaller Tsallis entropy of order 1.5 than the
/// covariance-matched 1.5-Gaussian, so the statistic converges to a negative
/// constant (about −0.165 at m = 1) and the upper-tail test rejects less often
/// than under the null.
#[test]
fn gaussian_against_heavy_null_is_below_level() {
    let trials = 100;
    let mut rejected = 0;
    let mut stats = Vec::new();
    for t in 0..trials {
        let x = SampleMatrix::new(1000, 1, draw_standard_normal(&mut RngStream::new(31, t), 1000))
            .unwrap();
        let r = run_test(
            &x,
            1,
            1.5,
            NullFamily::T1,
            0.05,
            CriticalSource::Simulate {
                replications: 200,
                seed: 20_000 + t,
            },
        )
        .unwrap();
        rejected += r.reject.unwrap() as usize;
        stats.push(r.statistic);
    }
    let (mean, _) = mean_se(&stats);
    assert!((mean + 0.165).abs() < 0.03, "mean Q {mean}");
    assert!((rejected as f64 / trials as f64) < 0.05, "rejections {rejected}");
}
