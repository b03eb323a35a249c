//! Seeded random streams.
//!
//! Every random stage draws from a ChaCha8 generator keyed by the caller's
//! seed and a fixed stream id, so sampling, edge coloring and vertex
//! splitting never share state: changing how many numbers one stage consumes
//! leaves the others untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent substream identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Sampling = 1,
    Coloring = 2,
    Splitting = 3,
    ColumnSplit = 4,
    ColumnPick = 5,
    CensorNoise = 6,
    Corruption = 7,
    StartVectors = 8,
}

/// Generator for `stream` under `seed`.
pub fn stream(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Seed of trial `index` in a batch starting at `base`.
pub fn trial_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}
