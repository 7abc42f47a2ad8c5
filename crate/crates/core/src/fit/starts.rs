//! Seeded low-discrepancy start points: a Halton sequence with a random
//! Cranley-Patterson shift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BASES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut acc = 0.0;
    while index > 0 {
        acc += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    acc
}

/// `count` points in `[0, 1)^D`.
pub fn shifted_halton<const D: usize>(count: usize, seed: u64) -> Vec<[f64; D]> {
    assert!(D <= BASES.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; D] = std::array::from_fn(|_| rng.gen::<f64>());
    (1..=count as u64).map(|i| std::array::from_fn(|d| (radical_inverse(i, BASES[d]) + shift[d]).fract())).collect()
}
