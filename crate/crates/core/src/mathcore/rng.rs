//! Seeded random streams and the primitive samplers built on them.
//!
//! A stream is ChaCha12 keyed by the 64-bit master seed (expanded with
//! SplitMix64) and positioned on the 64-bit ChaCha stream selected by
//! `stream_index`. Distinct indices give independent keystreams without any
//! coordination, so parallel Monte Carlo tasks just take `cell × M + rep`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Result};

/// A reproducible random stream identified by `(master_seed, stream_index)`.
///
/// Single owner: never share one stream between concurrent tasks.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    inner: ChaCha12Rng,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut state = master_seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut inner = ChaCha12Rng::from_seed(key);
        inner.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

pub fn draw_uniform(rng: &mut RngStream) -> f64 {
    // 53 random mantissa bits, uniform on [0, 1).
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn draw_standard_normal(rng: &mut RngStream, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub(crate) fn draw_normal_one(rng: &mut RngStream) -> f64 {
    StandardNormal.sample(rng)
}

/// Unit-scale Gamma(shape) draw. Shapes below one are boosted from
/// `shape + 1` with the `U^{1/shape}` transform.
pub fn draw_gamma(rng: &mut RngStream, shape: f64) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() {
        return domain(format!("gamma shape must be positive, got {shape}"));
    }
    let dist = rand_distr::Gamma::new(shape, 1.0)
        .map_err(|e| crate::Error::Domain(format!("gamma shape {shape}: {e}")))?;
    Ok(dist.sample(rng))
}

/// Beta(a, b) draw as `G_a / (G_a + G_b)`.
pub fn draw_beta(rng: &mut RngStream, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return domain(format!("beta parameters must be positive, got ({a}, {b})"));
    }
    let x = draw_gamma(rng, a)?;
    let y = draw_gamma(rng, b)?;
    Ok(x / (x + y))
}

/// Uniform direction on the unit sphere in R^m (a normalized Gaussian vector).
pub fn draw_uniform_sphere(rng: &mut RngStream, m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return domain("sphere dimension must be at least 1");
    }
    loop {
        let mut v = draw_standard_normal(rng, m);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
            return Ok(v);
        }
    }
}
