//! Seeded randomness. Every stochastic path in the crate takes an explicit
//! `u64` seed and builds its generator here, so results are reproducible
//! bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// FNV-1a over a byte string, used to derive sub-seeds from stable keys.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Mix a base seed with a textual key into a new seed.
pub fn derive_seed(seed: u64, key: &str) -> u64 {
    let mut h = fnv1a(key.as_bytes()) ^ seed.rotate_left(17);
    // splitmix64 finalizer
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}
