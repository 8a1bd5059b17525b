//! Deterministic randomness for graph generation and split sampling.
//!
//! Every random draw in this crate flows through [`SeededRng`], a thin wrapper
//! around ChaCha with 8 rounds (`ChaCha8Rng`), seeded through
//! `SeedableRng::seed_from_u64`. ChaCha8 is a fixed, portable algorithm: the
//! same seed yields the same stream on every platform, so generated graphs and
//! splits replicate bit-for-bit across runs, thread counts, and machines.
//!
//! The derived draws are specified exactly so that results can be reproduced
//! by other implementations:
//!
//! * [`SeededRng::unit_f64`] — take the next 64-bit word `x` and return
//!   `(x >> 11) as f64 * 2^-53`, uniform on `[0, 1)`.
//! * [`SeededRng::index`] — unbiased integer in `[0, n)` by rejection: with
//!   `zone = u64::MAX - (u64::MAX - n + 1) % n`, draw `x` until `x <= zone`,
//!   then return `x % n`.
//! * [`SeededRng::shuffle`] — Fisher-Yates: for `i` from `len - 1` down to 1,
//!   swap positions `i` and `index(i + 1)`.

use rand_core::{RngCore, SeedableRng};

pub struct SeededRng(rand_chacha::ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform draw on `[0, 1)` using the top 53 bits of one 64-bit word.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unbiased uniform index in `[0, n)`. Panics if `n == 0`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index bound must be positive");
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return (x % n) as usize;
            }
        }
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}
