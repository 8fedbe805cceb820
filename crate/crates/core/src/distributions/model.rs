//! Tagged model record used by the tests and the command-line sampler.

use crate::error::{domain, Result};
use crate::linalg::{SampleMatrix, SymMatrix};
use crate::mathcore::RngStream;

use super::gg::{gg_log_pdf, gg_sample, GGParams};
use super::qgauss::{qgauss_log_pdf, qgauss_sample, QGaussianParams};

/// Null hypotheses of the one-sided tests: `T1` is the heavy-tailed
/// q-Gaussian with `q ∈ (1, 3)`, `T2` the compact one with `q ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum NullFamily {
    T1,
    T2,
}

impl NullFamily {
    pub fn admits(self, q: f64) -> bool {
        match self {
            NullFamily::T1 => q > 1.0 && q < 3.0,
            NullFamily::T2 => q > 0.0 && q < 1.0,
        }
    }

    /// The family matching `q`, if any.
    pub fn for_q(q: f64) -> Option<Self> {
        [NullFamily::T1, NullFamily::T2].into_iter().find(|f| f.admits(q))
    }
}

impl std::fmt::Display for NullFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NullFamily::T1 => "T1",
            NullFamily::T2 => "T2",
        })
    }
}

impl std::str::FromStr for NullFamily {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T1" => Ok(NullFamily::T1),
            "T2" => Ok(NullFamily::T2),
            _ => domain(format!("unknown null family {s:?}; expected T1 or T2")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    GeneralizedGaussian(GGParams),
    QGaussian(QGaussianParams),
}

/// A parametric model, optionally tagged as the null of one of the tests.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    family: Family,
    role: Option<NullFamily>,
}

impl ModelSpec {
    pub fn new(family: Family, role: Option<NullFamily>) -> Result<Self> {
        if let Some(role) = role {
            match &family {
                Family::QGaussian(p) if role.admits(p.q()) => {}
                Family::QGaussian(p) => {
                    return domain(format!("q = {} is outside the range of null {role}", p.q()))
                }
                Family::GeneralizedGaussian(_) => {
                    return domain(format!("null {role} is a q-Gaussian family"))
                }
            }
        }
        Ok(Self { family, role })
    }

    pub fn free(family: Family) -> Self {
        Self { family, role: None }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn role(&self) -> Option<NullFamily> {
        self.role
    }

    pub fn dim(&self) -> usize {
        match &self.family {
            Family::GeneralizedGaussian(p) => p.dim(),
            Family::QGaussian(p) => p.dim(),
        }
    }

    pub fn log_pdf(&self, x: &[f64]) -> Result<f64> {
        match &self.family {
            Family::GeneralizedGaussian(p) => gg_log_pdf(x, p),
            Family::QGaussian(p) => qgauss_log_pdf(x, p),
        }
    }

    pub fn sample(&self, n: usize, rng: &mut RngStream) -> Result<SampleMatrix> {
        match &self.family {
            Family::GeneralizedGaussian(p) => gg_sample(p, n, rng),
            Family::QGaussian(p) => qgauss_sample(p, n, rng),
        }
    }

    pub fn covariance(&self) -> Result<SymMatrix> {
        match &self.family {
            Family::GeneralizedGaussian(p) => Ok(p.covariance()),
            Family::QGaussian(p) => p.covariance(),
        }
    }
}
