use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Reproducible random stream: a master seed plus a stream index.
///
/// Each `(master_seed, stream_id)` pair maps onto an independent ChaCha20
/// stream, so trajectory `i` of an ensemble draws the same numbers no matter
/// which thread or in which order it is executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub master_seed: u64,
    #[serde(default)]
    pub stream_id: u64,
}

impl Seed {
    pub const fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Seed of the `index`-th member of an ensemble rooted at `self`.
    pub fn stream(self, index: u64) -> Self {
        Self {
            master_seed: self.master_seed,
            stream_id: self.stream_id.wrapping_add(index),
        }
    }

    pub fn rng(self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

impl Default for Seed {
    fn default() -> Self {
        Self::new(0, 0)
    }
}
