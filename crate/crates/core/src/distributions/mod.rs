//! Model families: multivariate generalized Gaussian (exponential power) and
//! q-Gaussian, with closed-form normalizers, q-integrals, Tsallis entropies
//! and exact samplers.
//!
//! Parameter records hold the shape matrix `Σ` of the density. Covariances
//! are derived quantities (`β(m, s) Σ` for the generalized Gaussian,
//! [`covariance_factor`]` · Σ` for the q-Gaussian).

mod gg;
mod model;
mod qgauss;

pub use gg::{
    gg_log_norm_const, gg_log_pdf, gg_norm_const, gg_q_integral, gg_sample, gg_tsallis_entropy,
    gg_variance_scale, GGParams,
};
pub use model::{Family, ModelSpec, NullFamily};
pub use qgauss::{
    covariance_factor, qgauss_log_norm_const, qgauss_log_pdf, qgauss_norm_const,
    qgauss_power_integral, qgauss_q_integral, qgauss_sample, qgauss_tsallis_entropy, QGaussianParams,
};

/// `e_q(x) = [1 + (1 − q) x]_+^{1/(1−q)}`, and `exp(x)` at `q = 1`.
pub fn q_exponential(x: f64, q: f64) -> f64 {
    if q == 1.0 {
        return x.exp();
    }
    let t = (1.0 - q) * x;
    if 1.0 + t <= 0.0 {
        return 0.0;
    }
    (t.ln_1p() / (1.0 - q)).exp()
}

/// `ln_q(y) = (y^{1−q} − 1)/(1 − q)` for `y > 0`, and `ln y` at `q = 1`.
pub fn q_logarithm(y: f64, q: f64) -> f64 {
    if q == 1.0 {
        return y.ln();
    }
    ((1.0 - q) * y.ln()).exp_m1() / (1.0 - q)
}

/// Tsallis entropy of the uniform law on a set of the given volume.
pub fn uniform_tsallis_entropy(volume: f64, q: f64) -> f64 {
    q_logarithm(volume, q)
}

/// Joint entropy of two independent systems, `H₁ + H₂ + (1 − q) H₁ H₂`.
pub fn pseudo_additive_sum(h1: f64, h2: f64, q: f64) -> f64 {
    h1 + h2 + (1.0 - q) * h1 * h2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_exponential_examples() {
        for q in [0.3, 1.0, 2.0, 2.7] {
            assert_eq!(q_exponential(0.0, q), 1.0);
        }
        assert!((q_exponential(1.0, 0.5) - 2.25).abs() < 1e-14);
        assert!((q_exponential(-2.0, 2.0) - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(q_exponential(-3.0, 0.5), 0.0);
    }

    #[test]
    fn q_exponential_inverts_q_logarithm() {
        for q in [0.2, 0.5, 0.999, 1.0, 1.5, 2.5] {
            for y in [1e-3, 0.4, 1.0, 3.0, 250.0] {
                let back = q_exponential(q_logarithm(y, q), q);
                assert!((back - y).abs() <= 1e-12 * y, "q={q} y={y} back={back}");
            }
        }
    }

    #[test]
    fn pseudo_additivity_of_uniforms() {
        for q in [0.5, 2.0] {
            let h1 = uniform_tsallis_entropy(2.0, q);
            let h2 = uniform_tsallis_entropy(3.0, q);
            let joint = uniform_tsallis_entropy(6.0, q);
            assert!((pseudo_additive_sum(h1, h2, q) - joint).abs() < 1e-14);
        }
    }
}
