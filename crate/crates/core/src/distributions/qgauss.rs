//! Multivariate q-Gaussian family
//!
//! `f(x) = C_q [1 − (1 − q) h(x) / 2]_+^{1/(1−q)}` with `h` the Mahalanobis
//! form of the shape matrix `Σ`. For `q < 1` the support is the ellipsoid
//! `h < 2/(1 − q)`; for `q > 1` the law is a scaled multivariate Student-t with
//! `ν = 2/(q − 1) − m` degrees of freedom. `q = 1` is the normal law.
//!
//! Every constant comes from one radial integral,
//! `I(p) = ∫₀^∞ [1 − (1 − q) r²/2]_+^p r^{m−1} dr`, in Beta-function form.

use std::f64::consts::{LN_2, PI};

use crate::error::{domain, Error, Result};
use crate::linalg::{SampleMatrix, SymMatrix, SymPDMatrix};
use crate::mathcore::{
    draw_beta, draw_gamma, draw_normal_one, draw_uniform_sphere, log_beta, log_sphere_area,
    RngStream,
};

#[derive(Debug, Clone, PartialEq)]
pub struct QGaussianParams {
    q: f64,
    mu: Vec<f64>,
    sigma: SymPDMatrix,
    nu: Option<f64>,
}

impl QGaussianParams {
    pub fn new(q: f64, mu: Vec<f64>, sigma: SymPDMatrix) -> Result<Self> {
        let m = sigma.dim();
        if mu.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: mu.len(),
            });
        }
        let nu = degrees_of_freedom(m, q)?;
        Ok(Self { q, mu, sigma, nu })
    }

    /// Centred member with identity shape matrix.
    pub fn standard(m: usize, q: f64) -> Result<Self> {
        Self::new(q, vec![0.0; m], SymPDMatrix::identity(m))
    }

    /// Member whose covariance equals `cov`.
    pub fn from_covariance(q: f64, mu: Vec<f64>, cov: &SymPDMatrix) -> Result<Self> {
        let factor = covariance_factor(cov.dim(), q)?;
        Self::new(q, mu, cov.scaled(1.0 / factor)?)
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &SymPDMatrix {
        &self.sigma
    }

    /// Student-t degrees of freedom, `Some` only on the `q > 1` branch.
    pub fn nu(&self) -> Option<f64> {
        self.nu
    }

    pub fn has_covariance(&self) -> bool {
        self.nu.is_none_or(|nu| nu > 2.0)
    }

    /// Mahalanobis radius of the support boundary when `q < 1`.
    pub fn support_radius(&self) -> Option<f64> {
        (self.q < 1.0).then(|| (2.0 / (1.0 - self.q)).sqrt())
    }

    pub fn covariance(&self) -> Result<SymMatrix> {
        let factor = covariance_factor(self.dim(), self.q)?;
        Ok(self.sigma.as_sym().scaled(factor))
    }
}

fn degrees_of_freedom(m: usize, q: f64) -> Result<Option<f64>> {
    if m == 0 {
        return domain("dimension must be at least 1");
    }
    if !(q > 0.0) || !q.is_finite() {
        return domain(format!("entropic index q must be positive, got {q}"));
    }
    if q <= 1.0 {
        return Ok(None);
    }
    let nu = 2.0 / (q - 1.0) - m as f64;
    if nu <= 0.0 {
        return Err(Error::NonNormalizable(format!(
            "q = {q} violates q < 1 + 2/m = {} for m = {m}",
            1.0 + 2.0 / m as f64
        )));
    }
    Ok(Some(nu))
}

/// Ratio between covariance and shape matrix, `Cov = factor · Σ`.
pub fn covariance_factor(m: usize, q: f64) -> Result<f64> {
    let nu = degrees_of_freedom(m, q)?;
    let mf = m as f64;
    match nu {
        None if q == 1.0 => Ok(1.0),
        None => {
            let b = 1.0 / (1.0 - q);
            Ok(2.0 / ((1.0 - q) * (mf + 2.0 + 2.0 * b)))
        }
        Some(nu) if nu > 2.0 => {
            let c2 = 2.0 / (nu * (q - 1.0));
            Ok(c2 * nu / (nu - 2.0))
        }
        Some(_) => Err(Error::Infeasible(format!(
            "q = {q} has no finite covariance for m = {m}; requires q < 1 + 2/(m + 2) = {}",
            1.0 + 2.0 / (mf + 2.0)
        ))),
    }
}

/// `ln I(p)` for the radial integral of the given branch. The caller has
/// checked convergence.
fn log_radial_integral(m: usize, q: f64, p: f64) -> f64 {
    let half_m = m as f64 / 2.0;
    if q < 1.0 {
        let a = (1.0 - q) / 2.0;
        -half_m * a.ln() - LN_2 + log_beta(half_m, p + 1.0).expect("positive arguments")
    } else {
        let a = (q - 1.0) / 2.0;
        -half_m * a.ln() - LN_2 + log_beta(half_m, -p - half_m).expect("positive arguments")
    }
}

fn log_sphere(m: usize) -> f64 {
    log_sphere_area(m).expect("dimension validated")
}

pub fn qgauss_log_norm_const(params: &QGaussianParams) -> f64 {
    let m = params.dim();
    let q = params.q;
    if q == 1.0 {
        return -0.5 * m as f64 * (2.0 * PI).ln() - 0.5 * params.sigma.log_det();
    }
    -(0.5 * params.sigma.log_det() + log_sphere(m) + log_radial_integral(m, q, 1.0 / (1.0 - q)))
}

/// Normalizing constant `C_q` (the density's leading factor).
pub fn qgauss_norm_const(params: &QGaussianParams) -> f64 {
    qgauss_log_norm_const(params).exp()
}

pub fn qgauss_log_pdf(x: &[f64], params: &QGaussianParams) -> Result<f64> {
    let h = params.sigma.mahalanobis_sq(x, &params.mu)?;
    let log_c = qgauss_log_norm_const(params);
    let q = params.q;
    if q == 1.0 {
        return Ok(log_c - 0.5 * h);
    }
    let t = -(1.0 - q) * h / 2.0;
    if q < 1.0 && 1.0 + t <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(log_c + t.ln_1p() / (1.0 - q))
}

/// `ln ∫ f^r dx` for an arbitrary power `r > 0`.
pub(crate) fn qgauss_log_power_integral(params: &QGaussianParams, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("power must be positive, got {r}"));
    }
    let m = params.dim();
    let q = params.q;
    let log_c = qgauss_log_norm_const(params);
    if q == 1.0 {
        // Gaussian: ∫ φ_Σ^r = (2π)^{m(1−r)/2} det Σ^{(1−r)/2} r^{−m/2}.
        return Ok(r * log_c + 0.5 * m as f64 * (2.0 * PI).ln()
            + 0.5 * params.sigma.log_det()
            - 0.5 * m as f64 * r.ln());
    }
    if q > 1.0 && r / (q - 1.0) <= m as f64 / 2.0 {
        return Err(Error::DivergentIntegral(format!(
            "integral of f^r diverges: requires r/(q - 1) > m/2, got {} <= {}",
            r / (q - 1.0),
            m as f64 / 2.0
        )));
    }
    Ok(r * log_c
        + 0.5 * params.sigma.log_det()
        + log_sphere(m)
        + log_radial_integral(m, q, r / (1.0 - q)))
}

pub(crate) fn qgauss_log_q_integral(params: &QGaussianParams) -> Result<f64> {
    if params.q == 1.0 {
        return Ok(0.0);
    }
    qgauss_log_power_integral(params, params.q)
}

/// `∫ f^r dx`; `r = q` gives the q-integral.
pub fn qgauss_power_integral(params: &QGaussianParams, r: f64) -> Result<f64> {
    Ok(qgauss_log_power_integral(params, r)?.exp())
}

/// `∫ f^q dx`.
pub fn qgauss_q_integral(params: &QGaussianParams) -> Result<f64> {
    Ok(qgauss_log_q_integral(params)?.exp())
}

/// Tsallis entropy `(1 − ∫f^q)/(q − 1)`; `q = 1` is rejected.
pub fn qgauss_tsallis_entropy(params: &QGaussianParams) -> Result<f64> {
    if params.q == 1.0 {
        return domain("Tsallis entropy is defined here for q != 1");
    }
    Ok(-qgauss_log_q_integral(params)?.exp_m1() / (params.q - 1.0))
}

/// Exact sampler through the elliptical representation of each branch.
pub fn qgauss_sample(
    params: &QGaussianParams,
    n: usize,
    rng: &mut RngStream,
) -> Result<SampleMatrix> {
    let m = params.dim();
    let q = params.q;
    let mut data = Vec::with_capacity(n * m);
    let mut z = vec![0.0; m];
    for _ in 0..n {
        if q < 1.0 {
            let u = draw_uniform_sphere(rng, m)?;
            let b = draw_beta(rng, m as f64 / 2.0, 1.0 / (1.0 - q) + 1.0)?;
            let rho = (2.0 * b / (1.0 - q)).sqrt();
            z.iter_mut().zip(&u).for_each(|(zi, ui)| *zi = ui * rho);
        } else {
            z.iter_mut().for_each(|zi| *zi = draw_normal_one(rng));
            if let Some(nu) = params.nu {
                let chi2 = 2.0 * draw_gamma(rng, nu / 2.0)?;
                let c = (2.0 / (nu * (q - 1.0))).sqrt();
                let scale = c / (chi2 / nu).sqrt();
                z.iter_mut().for_each(|zi| *zi *= scale);
            }
        }
        let y = params.sigma.mul_factor(&z);
        data.extend(y.iter().zip(&params.mu).map(|(a, b)| a + b));
    }
    SampleMatrix::new(n, m, data)
}
