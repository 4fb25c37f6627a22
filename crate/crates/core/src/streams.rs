//! Random-stream derivation.
//!
//! Every worker owns a [`ChaCha8Rng`]. Streams are derived from a master
//! seed by the rule
//!
//! ```text
//! stream(seed, purpose, index) = ChaCha8(key = seed, stream = purpose << 40 | index)
//! ```
//!
//! so replica `r` of a study always sees the same dataset and chain draws
//! regardless of how many replicas run or in which order they execute.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// What a derived stream is used for. Distinct purposes never overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Chain = 1,
    Dataset = 2,
    Envelope = 3,
    SignFit = 4,
    Oracle = 5,
}

pub fn master(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derive(seed: u64, purpose: Purpose, index: u64) -> Rng {
    assert!(index < (1 << 40), "stream index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 40) | index);
    rng
}
