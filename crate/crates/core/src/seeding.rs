//! Deterministic seed derivation.

use std::hash::{Hash, Hasher};

use fnv::FnvHasher;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a digest of any hashable value; stable across runs and threads.
pub fn derive_seed(parts: impl Hash) -> u64 {
    let mut h = FnvHasher::default();
    parts.hash(&mut h);
    h.finish()
}

pub fn rng_for(parts: impl Hash) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(parts))
}
