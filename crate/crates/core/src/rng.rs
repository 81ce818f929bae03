//! Seeded, splittable randomness.
//!
//! Every random quantity in a run comes from a ChaCha20 stream keyed by
//! `(seed, trial)` and selected by a [`Stream`] id, so any one party's draws
//! can be replayed without touching the others.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type Rng = ChaCha20Rng;

/// Independent random streams within one protocol run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    /// Alice's private randomness M: the channel input X^n.
    Alice = 1,
    /// Bob's private randomness N: his set selections.
    Bob = 2,
    /// Channel noise: two draws per channel use (Bob's BEC, then Eve's).
    Channel = 3,
    /// Public randomness: code and hash seeds.
    Public = 4,
    /// Inputs chosen by the experiment (K0, K1, C).
    Inputs = 5,
}

/// The RNG for `stream` in trial `trial` of an experiment seeded with `seed`.
pub fn stream(seed: u64, trial: u64, stream: Stream) -> Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    key[16..24].copy_from_slice(b"otwiretp");
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(stream as u64);
    rng
}

/// A plain seeded generator for experiment-level draws.
pub fn seeded(seed: u64) -> Rng {
    ChaCha20Rng::seed_from_u64(seed)
}
