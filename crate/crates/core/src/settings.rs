use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Enumeration budget and sampling controls shared by all checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Settings {
    /// Largest set enumerated exhaustively.
    pub budget: u64,
    /// Sample count for checks that fall back to sampling.
    pub samples: usize,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            budget: 1_000_000,
            samples: 200,
            seed: 0x5eed,
        }
    }
}

impl Settings {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// A generator seeded from the settings seed and a stream label.
    pub fn rng_for(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }
}
