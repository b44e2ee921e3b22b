//! Counter-based random streams: one independent ChaCha8 stream per
//! `(seed, domain, index)`, so results never depend on worker scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream families, kept disjoint so that one seed drives every simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Walk = 1,
    Field = 2,
    Drive = 3,
    Harmonic = 4,
    Oracle = 5,
}

const INDEX_BITS: u32 = 56;

pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    assert!(index < 1 << INDEX_BITS, "stream index {index} out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << INDEX_BITS) | index);
    rng
}
