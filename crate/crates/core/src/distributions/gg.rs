//! Multivariate exponential power (generalized Gaussian) family
//!
//! `f(x) = exp(−½ [(x − α)ᵀ Σ⁻¹ (x − α)]^{s/2}) / C(m, s, Σ)` with
//! `C = π^{m/2} Γ(m/s + 1) 2^{m/s} √det Σ / Γ(m/2 + 1)`.

use crate::error::{domain, Error, Result};
use crate::linalg::{SampleMatrix, SymMatrix, SymPDMatrix};
use crate::mathcore::{draw_gamma, draw_uniform_sphere, log_gamma_unchecked, RngStream};

#[derive(Debug, Clone, PartialEq)]
pub struct GGParams {
    s: f64,
    alpha: Vec<f64>,
    sigma: SymPDMatrix,
}

fn check_shape(s: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return domain(format!("shape exponent s must be positive, got {s}"));
    }
    Ok(())
}

impl GGParams {
    pub fn new(s: f64, alpha: Vec<f64>, sigma: SymPDMatrix) -> Result<Self> {
        check_shape(s)?;
        if alpha.len() != sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: sigma.dim(),
                actual: alpha.len(),
            });
        }
        Ok(Self { s, alpha, sigma })
    }

    /// Centred, isotropic member (`α = 0`, `Σ = I`).
    pub fn isotropic(m: usize, s: f64) -> Result<Self> {
        Self::new(s, vec![0.0; m], SymPDMatrix::identity(m))
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn sigma(&self) -> &SymPDMatrix {
        &self.sigma
    }

    /// `Var(X) = β(m, s) Σ`.
    pub fn covariance(&self) -> SymMatrix {
        let beta = gg_variance_scale(self.dim(), self.s).expect("validated parameters");
        self.sigma.as_sym().scaled(beta)
    }
}

pub fn gg_log_norm_const(s: f64, sigma: &SymPDMatrix) -> Result<f64> {
    check_shape(s)?;
    let m = sigma.dim() as f64;
    Ok(0.5 * m * std::f64::consts::PI.ln()
        + log_gamma_unchecked(m / s + 1.0)
        + (m / s) * std::f64::consts::LN_2
        + 0.5 * sigma.log_det()
        - log_gamma_unchecked(m / 2.0 + 1.0))
}

/// Normalization constant `C(m, s, Σ)`, the reciprocal of the density's leading factor.
pub fn gg_norm_const(s: f64, sigma: &SymPDMatrix) -> Result<f64> {
    Ok(gg_log_norm_const(s, sigma)?.exp())
}

pub fn gg_log_pdf(x: &[f64], params: &GGParams) -> Result<f64> {
    let h = params.sigma.mahalanobis_sq(x, &params.alpha)?;
    Ok(-gg_log_norm_const(params.s, &params.sigma)? - 0.5 * h.powf(params.s / 2.0))
}

/// `β(m, s) = 2^{2/s} Γ((m + 2)/s) / (m Γ(m/s))`.
pub fn gg_variance_scale(m: usize, s: f64) -> Result<f64> {
    check_shape(s)?;
    if m == 0 {
        return domain("dimension must be at least 1");
    }
    let mf = m as f64;
    Ok(((2.0 / s) * std::f64::consts::LN_2 + log_gamma_unchecked((mf + 2.0) / s)
        - mf.ln()
        - log_gamma_unchecked(mf / s))
    .exp())
}

/// `X = α + r Σ^{1/2} U` with `U` uniform on the sphere and `r = (2G)^{1/s}`,
/// `G ~ Gamma(m/s)`, which is the radial law `∝ r^{m−1} exp(−r^s / 2)`.
pub fn gg_sample(params: &GGParams, n: usize, rng: &mut RngStream) -> Result<SampleMatrix> {
    let m = params.dim();
    let shape = m as f64 / params.s;
    let mut data = Vec::with_capacity(n * m);
    for _ in 0..n {
        let u = draw_uniform_sphere(rng, m)?;
        let r = (2.0 * draw_gamma(rng, shape)?).powf(1.0 / params.s);
        let scaled: Vec<f64> = u.iter().map(|v| v * r).collect();
        let y = params.sigma.mul_factor(&scaled);
        data.extend(y.iter().zip(&params.alpha).map(|(a, b)| a + b));
    }
    SampleMatrix::new(n, m, data)
}

fn check_order(q: f64) -> Result<()> {
    if !(q > 0.0) || !q.is_finite() {
        return domain(format!("entropic order q must be positive, got {q}"));
    }
    Ok(())
}

pub(crate) fn gg_log_q_integral(s: f64, sigma: &SymPDMatrix, q: f64) -> Result<f64> {
    check_order(q)?;
    let m = sigma.dim() as f64;
    Ok((1.0 - q) * gg_log_norm_const(s, sigma)? - (m / s) * q.ln())
}

/// `∫ f^q dx = C(m, s, Σ)^{1−q} q^{−m/s}`.
pub fn gg_q_integral(s: f64, sigma: &SymPDMatrix, q: f64) -> Result<f64> {
    Ok(gg_log_q_integral(s, sigma, q)?.exp())
}

/// Tsallis entropy `(∫f^q − 1)/(1 − q)`; `q = 1` is rejected.
pub fn gg_tsallis_entropy(s: f64, sigma: &SymPDMatrix, q: f64) -> Result<f64> {
    if q == 1.0 {
        return domain("Tsallis entropy is defined here for q != 1");
    }
    Ok(gg_log_q_integral(s, sigma, q)?.exp_m1() / (1.0 - q))
}
