//! Seeded random streams.
//!
//! Replicate `k` of a batch seeded with `s` draws from
//! `RngStream::new(replicate_seed(s, k))`, where `replicate_seed` applies the
//! SplitMix64 finalizer to `s + (k + 1) * 0x9E3779B97F4A7C15`:
//!
//! ```text
//! z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//! z ^= z >> 27; z *= 0x94D049BB133111EB;
//! z ^= z >> 31;
//! ```
//!
//! The underlying generator is ChaCha8 seeded with `seed_from_u64`.
//! Uniforms are `((x >> 11) + 0.5) / 2^53` for a raw 64-bit word `x`, which
//! lies strictly inside (0, 1). Exponentials are always drawn by inversion,
//! `-ln(U) / rate`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Source of uniform(0, 1) variates.
pub trait UniformSource {
    /// A draw strictly inside (0, 1).
    fn uniform(&mut self) -> f64;

    fn exponential(&mut self, rate: f64) -> f64 {
        -self.uniform().ln() / rate
    }
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replicate `index` of a batch seeded with `seed`.
pub fn replicate_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Deterministic random stream. Not to be shared between tasks.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Stream for replicate `index` of a batch.
    pub fn for_replicate(seed: u64, index: u64) -> Self {
        RngStream::new(replicate_seed(seed, index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl UniformSource for RngStream {
    fn uniform(&mut self) -> f64 {
        let bits = self.inner.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// Replays a fixed list of uniforms; panics when exhausted. Intended for tests.
#[derive(Debug, Clone)]
pub struct FixedUniforms {
    values: Vec<f64>,
    next: usize,
}

impl FixedUniforms {
    pub fn new(values: Vec<f64>) -> Self {
        FixedUniforms { values, next: 0 }
    }
}

impl UniformSource for FixedUniforms {
    fn uniform(&mut self) -> f64 {
        let u = self.values[self.next];
        self.next += 1;
        u
    }
}
