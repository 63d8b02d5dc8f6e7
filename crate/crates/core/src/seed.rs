//! Deterministic seed derivation.
//!
//! Every random draw in the toolkit comes from a ChaCha stream whose key is
//! derived from a master seed through [`derive`]. Work items never share a
//! stream, so results do not depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer. A bijection on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `base` and a `salt`. For a fixed `base`,
/// distinct salts give distinct children.
#[inline]
pub fn derive(base: u64, salt: u64) -> u64 {
    mix64(base.wrapping_add(salt.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// A ChaCha8 generator keyed by `seed` and positioned on `stream`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
