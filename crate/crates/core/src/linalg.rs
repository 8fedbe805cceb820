//! Small dense symmetric matrices, Cholesky factors, Mahalanobis forms and
//! sample moments.
//!
//! Matrices are stored row-major. Sums over observations are taken over the
//! sorted terms ([`ordered_sum`]) so that means, covariances and everything
//! built on them are bit-identical under any permutation of the rows.

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const PIVOT_TOL: f64 = 1e-12;

/// Sum of `values` taken in ascending order; a pure function of the multiset.
pub fn ordered_sum(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    values.iter().sum()
}

/// N observations in R^m, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    n: usize,
    m: usize,
    data: Vec<f64>,
}

impl SampleMatrix {
    pub fn new(n: usize, m: usize, data: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("sample dimension must be at least 1".into()));
        }
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "a sample needs at least 2 observations, got {n}"
            )));
        }
        if data.len() != n * m {
            return Err(Error::DimensionMismatch {
                expected: n * m,
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at row {}, column {}",
                pos / m,
                pos % m
            )));
        }
        Ok(Self { n, m, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} columns, expected {m}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), m, data)
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.m
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.m)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Applies `x ↦ c·x + shift` to every row.
    pub fn affine(&self, c: f64, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                actual: shift.len(),
            });
        }
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(idx, v)| c * v + shift[idx % self.m])
            .collect();
        Self::new(self.n, self.m, data)
    }
}

/// A symmetric matrix that need not be positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dimension must be at least 1".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let (a, b) = (data[i * dim + j], data[j * dim + i]);
                let scale = a.abs().max(b.abs());
                if (a - b).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut data = vec![0.0; dim * dim];
        for (i, d) in diag.iter().enumerate() {
            data[i * dim + i] = *d;
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Cholesky-factorizes the matrix, failing on a non-positive pivot.
    pub fn to_pd(&self) -> Result<SymPDMatrix> {
        let factor = cholesky(self)?;
        let log_det = 2.0
            * (0..self.dim)
                .map(|i| factor[i * self.dim + i].ln())
                .sum::<f64>();
        Ok(SymPDMatrix {
            sym: self.clone(),
            factor,
            log_det,
        })
    }
}

/// Lower Cholesky factor `L` (row-major) with `L·Lᵀ = A`. No pivoting; a pivot
/// at or below `1e-12 · max diag(A)` is reported as non-positive-definite.
pub fn cholesky(a: &SymMatrix) -> Result<Vec<f64>> {
    let n = a.dim;
    let max_diag = (0..n).map(|i| a.get(i, i)).fold(0.0_f64, f64::max);
    let threshold = PIVOT_TOL * max_diag;
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for p in 0..j {
                sum -= l[i * n + p] * l[j * n + p];
            }
            if i == j {
                if !(sum > threshold) {
                    return Err(Error::NotPositiveDefinite { pivot: i, value: sum });
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// A symmetric positive-definite matrix with its cached Cholesky factor and
/// log-determinant. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymPDMatrix {
    sym: SymMatrix,
    factor: Vec<f64>,
    log_det: f64,
}

impl SymPDMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        SymMatrix::new(dim, data)?.to_pd()
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix::identity(dim)
            .to_pd()
            .expect("identity is positive definite")
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        SymMatrix::diagonal(diag).to_pd()
    }

    pub fn dim(&self) -> usize {
        self.sym.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.sym.get(i, j)
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.sym
    }

    pub fn cholesky_factor(&self) -> &[f64] {
        &self.factor
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// `c · A` for `c > 0`, reusing the factor (`√c · L`).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!("scale factor must be positive, got {c}")));
        }
        let root = c.sqrt();
        Ok(Self {
            sym: self.sym.scaled(c),
            factor: self.factor.iter().map(|v| v * root).collect(),
            log_det: self.log_det + self.dim() as f64 * c.ln(),
        })
    }

    /// `L · z` for the lower factor `L`.
    pub fn mul_factor(&self, z: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..=i).map(|j| self.factor[i * n + j] * z[j]).sum())
            .collect()
    }

    /// `(x − μ)ᵀ A⁻¹ (x − μ)` via a forward solve against the factor.
    pub fn mahalanobis_sq(&self, x: &[f64], mu: &[f64]) -> Result<f64> {
        let n = self.dim();
        for v in [x.len(), mu.len()] {
            if v != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: v,
                });
            }
        }
        let mut y = vec![0.0; n];
        let mut total = 0.0;
        for i in 0..n {
            let mut s = x[i] - mu[i];
            for j in 0..i {
                s -= self.factor[i * n + j] * y[j];
            }
            y[i] = s / self.factor[i * n + i];
            total += y[i] * y[i];
        }
        Ok(total)
    }
}

/// `log det A` through the Cholesky factor.
pub fn log_det(a: &SymMatrix) -> Result<f64> {
    Ok(a.to_pd()?.log_det())
}

/// Column means and the N−1 sample covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMoments {
    pub mean: Vec<f64>,
    pub cov: SymMatrix,
}

pub fn sample_mean_cov(x: &SampleMatrix) -> SampleMoments {
    let (n, m) = (x.nrows(), x.ncols());
    let mut buf = vec![0.0; n];
    let mean: Vec<f64> = (0..m)
        .map(|c| {
            for (i, row) in x.rows().enumerate() {
                buf[i] = row[c];
            }
            ordered_sum(&mut buf) / n as f64
        })
        .collect();
    let mut cov = vec![0.0; m * m];
    for a in 0..m {
        for b in a..m {
            for (i, row) in x.rows().enumerate() {
                buf[i] = (row[a] - mean[a]) * (row[b] - mean[b]);
            }
            let v = ordered_sum(&mut buf) / (n - 1) as f64;
            cov[a * m + b] = v;
            cov[b * m + a] = v;
        }
    }
    SampleMoments {
        mean,
        cov: SymMatrix { dim: m, data: cov },
    }
}
