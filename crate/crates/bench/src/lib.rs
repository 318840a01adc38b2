//! Shared helpers for the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use svan_core::tensor::Tensor4;

/// Deterministic random tensor for benchmark inputs.
pub fn bench_tensor(seed: u64, n: usize, c: usize, h: usize, w: usize) -> Tensor4 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Tensor4::from_fn(n, c, h, w, |_, _, _, _| rng.random_range(-1.0..1.0))
}
