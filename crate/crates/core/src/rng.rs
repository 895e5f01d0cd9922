//! Seed derivation.
//!
//! All randomness comes from `ChaCha8Rng` streams whose seeds are derived with
//! the SplitMix64 finalizer, so the same `(seed, stream)` pair produces the same
//! numbers on every platform and regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function applied to `x + GOLDEN`.
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for stream `a` of `seed`.
pub fn derive(seed: u64, a: u64) -> u64 {
    mix64(mix64(seed) ^ a.wrapping_mul(GOLDEN))
}

/// `split(base, i, j) = derive(derive(base, i), j)`; used for per-trial seeds.
pub fn split(base: u64, i: u64, j: u64) -> u64 {
    derive(derive(base, i), j)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
