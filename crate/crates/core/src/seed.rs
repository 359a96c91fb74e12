//! Seed derivation and the simulation RNG.
//!
//! All randomness flows from `u64` seeds. Child streams are derived with
//! [`derive_seed`], a SplitMix64 finaliser over `(parent, index)`, so that
//! replications, traders and flows get independent yet reproducible streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG used throughout the simulator. ChaCha output is stable across
/// platforms and releases of `rand_chacha`.
pub type SimRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of child stream `index` under `parent`.
///
/// `derive_seed(m, i) = splitmix64(m ^ splitmix64(i))`.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    splitmix64(parent ^ splitmix64(index))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
