//! Stable seed derivation.
//!
//! Every stochastic decision in a run draws from a seed derived from the
//! coordinates of that decision (run seed, generation, index, ...). The mixing
//! function is fixed so derived values are identical across platforms and
//! crate versions.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of coordinates into one 64-bit seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x5253_4245_4E43_4821u64, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Stable 64-bit FNV-1a hash of a byte string.
pub fn stable_hash(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    splitmix64(h)
}

/// Maps a 64-bit value to a uniform draw in `[0, 1)`.
pub fn unit_interval(x: u64) -> f64 {
    (x >> 11) as f64 / (1u64 << 53) as f64
}

/// Domain tags separating the seed streams of different decisions.
pub mod tag {
    pub const INIT: u64 = 1;
    pub const VARY: u64 = 2;
    pub const EVAL: u64 = 3;
    pub const PARENTS: u64 = 4;
    pub const SAMPLE: u64 = 5;
    pub const VALIDATE: u64 = 6;
    pub const CANDIDATES: u64 = 7;
    pub const ABLATION: u64 = 8;
    pub const REEVAL: u64 = 9;
}
