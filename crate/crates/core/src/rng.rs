//! The single seeded generator behind every random choice.
//!
//! The generator is SplitMix64: with 64-bit state `s`, each draw does
//!
//! ```text
//! s = s + 0x9e3779b97f4a7c15            (wrapping)
//! z = s
//! z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9   (wrapping)
//! z = (z ^ (z >> 27)) * 0x94d049bb133111eb   (wrapping)
//! return z ^ (z >> 31)
//! ```
//!
//! and the initial state is the seed itself. Independent streams for one run
//! (tensor entries, evaluation points, ...) are derived with [`stream`], which
//! seeds a fresh generator from `seed ^ (tag * 0x9e3779b97f4a7c15)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Stream tags for the derived generators.
pub mod tags {
    pub const TENSOR: u64 = 0;
    pub const IDENTITY_TEST: u64 = 1;
    pub const PERTURBATION: u64 = 2;
}

pub fn seeded(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Generator for stream `tag` of `seed`. Tag 0 is the plain seeded generator.
pub fn stream(seed: u64, tag: u64) -> SplitMix64 {
    seeded(seed ^ tag.wrapping_mul(GOLDEN))
}

/// Uniform-ish value in `[0, bound)` by reduction of one 64-bit draw.
pub fn below(rng: &mut impl RngCore, bound: u64) -> u64 {
    rng.next_u64() % bound
}
