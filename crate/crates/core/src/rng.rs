//! Hierarchical, counter-based seeding.
//!
//! Every random stream is a ChaCha8 generator keyed by a 64-bit seed derived
//! from a master seed and a path of integers (stream tag, cell index,
//! replicate index, ...). A stream therefore depends only on its path, never
//! on the order in which streams are created, so serial and parallel runs
//! draw identical numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream tags used across the crate.
pub mod tag {
    pub const BOOTSTRAP: u64 = 0x01;
    pub const CV_FOLDS: u64 = 0x02;
    pub const SIMULATION: u64 = 0x03;
    pub const ROBUSTNESS: u64 = 0x04;
    pub const CRITERION: u64 = 0x05;
    pub const BOOT_X_STEP: u64 = 0x06;
    pub const BOOT_Y_STEP: u64 = 0x07;
    pub const TEST_EXTENSION: u64 = 0x08;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and a path of indices.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |s, &p| {
        splitmix64(s ^ splitmix64(p.wrapping_add(0x632B_E59B_D9B4_E019)))
    })
}

/// A generator for the stream at `path` under `master`.
pub fn stream(master: u64, path: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}
