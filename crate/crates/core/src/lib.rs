//! Tsallis-entropy goodness-of-fit testing for multivariate q-Gaussian and
//! generalized Gaussian (exponential power) models.
//!
//! The crate is organised bottom-up:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`mathcore`] | log-gamma, unit-ball volumes, normal CDF/quantile, seeded RNG streams, primitive samplers, adaptive quadrature |
//! | [`linalg`] | symmetric positive-definite matrices, Cholesky, Mahalanobis forms, sample moments |
//! | [`distributions`] | generalized Gaussian and q-Gaussian densities, q-integrals, Tsallis entropies, exact samplers |
//! | [`knn`] | exact k-th nearest neighbour distances (brute force and kd-tree) |
//! | [`entropy`] | the k-NN Tsallis entropy estimator and the consistency-condition checker |
//! | [`gof`] | goodness-of-fit statistics, critical-value tables, the test decision |
//! | [`statkit`] | Shapiro–Wilk, empirical quantiles, OLS, KS, histograms |
//!
//! Tsallis entropy follows the convention `H_q(f) = (∫f^q − 1) / (1 − q)`.

pub mod distributions;
pub mod entropy;
mod error;
pub mod gof;
pub mod knn;
pub mod linalg;
pub mod mathcore;
pub mod statkit;

pub use error::{Error, Result};
pub use linalg::{SampleMatrix, SymMatrix, SymPDMatrix};
pub use mathcore::RngStream;
