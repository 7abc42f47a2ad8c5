//! Deterministic seed derivation.
//!
//! Every parallel unit of work (a scan window, a bootstrap replica) gets its
//! own seed derived from the run seed and the unit's identity, so results do
//! not depend on scheduling.

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into `base`, order sensitive.
pub fn derive(base: u64, parts: &[i64]) -> u64 {
    parts.iter().fold(splitmix64(base), |acc, p| splitmix64(acc ^ (*p as u64)))
}
