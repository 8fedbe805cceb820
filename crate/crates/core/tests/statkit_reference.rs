//! Shapiro–Wilk against reference vectors computed with scipy.stats.shapiro,
//! plus the calibration properties of the test.

use tsallis_core::mathcore::{draw_standard_normal, std_normal_quantile};
use tsallis_core::statkit::shapiro_wilk;
use tsallis_core::RngStream;

const REFERENCE: &str = include_str!("data/shapiro_reference.csv");

#[test]
fn matches_reference_vectors() {
    let mut worst: (f64, f64) = (0.0, 0.0);
    for line in REFERENCE.lines().filter(|l| !l.starts_with('#')) {
        let mut fields = line.split(',');
        let name = fields.next().unwrap();
        let w: f64 = fields.next().unwrap().parse().unwrap();
        let p: f64 = fields.next().unwrap().parse().unwrap();
        let x: Vec<f64> = fields.next().unwrap().split(';').map(|v| v.parse().unwrap()).collect();
        let r = shapiro_wilk(&x).unwrap();
        assert_eq!(r.n, x.len());
        assert!((r.w - w).abs() <= 1e-3, "{name}: W {} vs {w}", r.w);
        assert!((r.p_value - p).abs() <= 1e-2, "{name}: p {} vs {p}", r.p_value);
        worst.0 = worst.0.max((r.w - w).abs());
        worst.1 = worst.1.max((r.p_value - p).abs());
    }
    println!("max |dW| = {:e}, max |dp| = {:e}", worst.0, worst.1);
}

#[test]
fn expected_normal_scores_look_normal() {
    let x: Vec<f64> = (1..=20)
        .map(|i| std_normal_quantile((i as f64 - 0.375) / 20.25).unwrap())
        .collect();
    assert!(shapiro_wilk(&x).unwrap().w >= 0.99);
}

#[test]
fn gross_outlier_is_rejected() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 100.0];
    assert!(shapiro_wilk(&x).unwrap().p_value < 0.01);
}

#[test]
fn null_rejection_rate() {
    let mut rejected = 0;
    for seed in 0..1000 {
        let x = draw_standard_normal(&mut RngStream::new(seed, 77), 100);
        if shapiro_wilk(&x).unwrap().p_value < 0.05 {
            rejected += 1;
        }
    }
    let rate = rejected as f64 / 1000.0;
    assert!((rate - 0.05).abs() <= 0.02, "rate {rate}");
}

#[test]
fn location_scale_invariance() {
    let x = draw_standard_normal(&mut RngStream::new(3, 3), 250);
    let y: Vec<f64> = x.iter().map(|v| 3.5 * v - 12.0).collect();
    let (a, b) = (shapiro_wilk(&x).unwrap(), shapiro_wilk(&y).unwrap());
    assert!((a.w - b.w).abs() < 1e-12);
    assert!((a.p_value - b.p_value).abs() < 1e-9);
}

#[test]
fn p_value_decreases_with_w() {
    let base = draw_standard_normal(&mut RngStream::new(4, 4), 60);
    let mut pairs = Vec::new();
    for j in 0..20 {
        // Increasingly skewed transforms of one sample.
        let x: Vec<f64> = base.iter().map(|v| (v * (0.1 * j as f64 + 0.01)).exp()).collect();
        let r = shapiro_wilk(&x).unwrap();
        pairs.push((r.w, r.p_value));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!(pairs.windows(2).all(|w| w[0].1 <= w[1].1));
}

#[test]
fn rejects_bad_input() {
    assert!(shapiro_wilk(&[1.0, 2.0]).is_err());
    assert!(shapiro_wilk(&[2.0; 10]).is_err());
    assert!(shapiro_wilk(&vec![0.5; 5001]).is_err());
}
