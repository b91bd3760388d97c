//! Counter-based random streams.
//!
//! Every draw is addressed by `(seed, stream, index)`: the ChaCha key comes
//! from the seed, the ChaCha stream id from `stream`, and the block counter
//! starts at `index << 24` words. A draw therefore never depends on how the
//! indices were split across workers.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Words reserved per draw index; far more than any draw consumes.
const WORDS_PER_DRAW_LOG2: u32 = 24;

/// Streams used by the samplers.
pub mod purpose {
    pub const CHANNEL: u64 = 0;
    pub const CONDITIONAL_Z: u64 = 1;
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn key_from_seed(seed: u64) -> [u8; 32] {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::from_seed(key_from_seed(seed));
        inner.set_stream(stream);
        inner.set_word_pos((index as u128) << WORDS_PER_DRAW_LOG2);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `(0, 1]` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Pair of independent standard normals (Box–Muller).
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let r = (-2.0 * self.uniform().ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * self.uniform()).sin_cos();
        (r * c, r * s)
    }

    /// Circular complex normal with `E|z|² = variance`.
    pub fn complex_normal(&mut self, variance: f64) -> Complex64 {
        let (re, im) = self.normal_pair();
        let sd = (0.5 * variance).sqrt();
        Complex64::new(re * sd, im * sd)
    }
}
