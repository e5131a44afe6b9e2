//! Counter-based random streams.
//!
//! Every random quantity of a trial is drawn from a ChaCha8 stream keyed by
//! `(seed, trial, domain, index)`. Streams never depend on evaluation order,
//! so results are identical under any thread count. Cluster draws depend
//! only on their spatial tile, which gives common random numbers across
//! window sizes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// Stream domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub(crate) enum Domain {
    Representative = 1,
    Tile = 2,
}

pub(crate) fn stream(seed: u64, trial: u64, domain: Domain, index: u64, tile: u64) -> TrialRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    key[16..24].copy_from_slice(&((domain as u64) << 56 | index).to_le_bytes());
    key[24..].copy_from_slice(&tile.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Packs signed tile coordinates into one key word.
pub(crate) fn tile_key(ix: i64, iy: i64) -> u64 {
    ((ix as i32 as u32 as u64) << 32) | (iy as i32 as u32 as u64)
}
