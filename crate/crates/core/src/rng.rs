//! Reproducible generator streams.
//!
//! Every random quantity in the crate is drawn from a `ChaCha8Rng` seeded by a
//! 64-bit seed and a stream index, so parallel workers never share state and
//! results depend only on `(seed, workers, samples)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Splits `total` into `workers` near-equal chunks (earlier workers get the remainder).
pub fn split_counts(total: u64, workers: usize) -> Vec<u64> {
    let w = workers.max(1) as u64;
    (0..w).map(|i| total / w + u64::from(i < total % w)).collect()
}
