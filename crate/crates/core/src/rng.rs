//! Seed derivation and counter-based uniforms.
//!
//! Every random quantity in a run is a pure function of the master seed.
//! Replica streams are derived with the SplitMix64 finalizer, and edge
//! weights are drawn from the SplitMix64 sequence evaluated at a position
//! keyed by the edge's global lattice coordinates, so nested boxes see the
//! same environment on their common edges.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// The SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Value number `index` of the SplitMix64 stream started at `seed`.
#[inline]
pub fn splitmix_at(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Maps 64 random bits to the open interval (0, 1).
#[inline]
pub fn open01(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Independent stream tags, so one replica's offsets never reuse its weights' bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Weights = 1,
    Offset = 2,
    Resample = 3,
    Tables = 4,
    Aux = 5,
}

/// Seed of replica `replica` under `master`, for a given stream.
pub fn replica_seed(master: u64, replica: u64, stream: Stream) -> u64 {
    let base = splitmix_at(master, replica);
    mix64(base ^ (stream as u64).wrapping_mul(GOLDEN_GAMMA))
}

/// A ChaCha8 generator for the given replica and stream.
pub fn replica_rng(master: u64, replica: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(replica_seed(master, replica, stream))
}
