//! Shapiro–Wilk W test for `3 ≤ n ≤ 5000` following Royston's 1995
//! approximation (Applied Statistics algorithm AS R94): coefficients from
//! normal scores with polynomial corrections for the two extreme weights, and
//! normalizing transforms of `W` for the p-value.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::mathcore::{std_normal_quantile, std_normal_sf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapiroResult {
    pub w: f64,
    pub p_value: f64,
    pub n: usize,
}

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Upper-half weights `a_1 ≥ … ≥ a_{n/2}` (the lower half is antisymmetric).
fn coefficients(n: usize) -> Result<Vec<f64>> {
    let half = n / 2;
    if n == 3 {
        return Ok(vec![std::f64::consts::FRAC_1_SQRT_2]);
    }
    let an = n as f64;
    let mut a = Vec::with_capacity(half);
    for i in 1..=half {
        // Largest scores first.
        a.push(-std_normal_quantile((i as f64 - 0.375) / (an + 0.25))?);
    }
    let summ2 = 2.0 * a.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / an.sqrt();
    let a1 = poly(&C1, rsn) + a[0] / ssumm2;
    let (first, fac) = if n > 5 {
        let a2 = a[1] / ssumm2 + poly(&C2, rsn);
        let fac = ((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        a[1] = a2;
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    a[0] = a1;
    for v in &mut a[first..] {
        *v /= fac;
    }
    Ok(a)
}

fn p_value(w: f64, n: usize) -> f64 {
    if n == 3 {
        let p = 6.0 / std::f64::consts::PI * (w.sqrt().asin() - (0.75f64).sqrt().asin());
        return p.clamp(0.0, 1.0);
    }
    let an = n as f64;
    let y = (1.0 - w).ln();
    if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return 1e-99;
        }
        let z = (-(gamma - y).ln() - poly(&C3, an)) / poly(&C4, an).exp();
        std_normal_sf(z)
    } else {
        let ln_n = an.ln();
        std_normal_sf((y - poly(&C5, ln_n)) / poly(&C6, ln_n).exp())
    }
}

pub fn shapiro_wilk(sample: &[f64]) -> Result<ShapiroResult> {
    let n = sample.len();
    if !(3..=5000).contains(&n) {
        return domain(format!("Shapiro-Wilk needs 3 <= n <= 5000, got n = {n}"));
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("sample contains non-finite values".into()));
    }
    let mut x = sample.to_vec();
    x.sort_unstable_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if range <= 0.0 {
        return Err(Error::DegenerateSample("all sample values are equal".into()));
    }
    let a = coefficients(n)?;
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut ss = 0.0;
    for v in &x {
        let d = (v - mean) / range;
        ss += d * d;
    }
    let mut lin = 0.0;
    for (i, ai) in a.iter().enumerate() {
        lin += ai * (x[n - 1 - i] - x[i]) / range;
    }
    // Weights are normalized, so W is the squared correlation.
    let w = (lin * lin / ss).min(1.0);
    Ok(ShapiroResult {
        w,
        p_value: p_value(w, n),
        n,
    })
}
