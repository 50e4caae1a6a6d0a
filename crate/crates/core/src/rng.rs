//! Seeded randomness.
//!
//! All sampling goes through ChaCha8 seeded from a 64-bit seed
//! (`ChaCha8Rng::seed_from_u64`). A uniform draw in `[0, 1)` takes the top 53
//! bits of the next 64-bit output, and an index below `n` is
//! `floor(uniform * n)`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng { inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Index in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        ((self.uniform01() * n as f64) as usize).min(n - 1)
    }

    /// Independent stream for a sub-task, derived from this one.
    pub fn fork(&mut self) -> SeededRng {
        SeededRng::new(self.next_u64())
    }
}
