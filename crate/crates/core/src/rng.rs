//! Counter-based RNG stream splitting.
//!
//! Every random quantity is drawn from a ChaCha8 stream addressed by
//! `(master seed, task index, purpose)`, so results never depend on how
//! tasks are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// What a stream is used for within one task (one SNP or one replicate).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Purpose {
    Data = 0,
    GibbsM1 = 1,
    GibbsM2 = 2,
    GibbsNull = 3,
    AnchorM1 = 4,
    AnchorM2 = 5,
    AnchorNull = 6,
    Pool = 7,
    Other = 8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub seed: u64,
    pub stream: u64,
}

impl StreamId {
    pub fn new(seed: u64, task: u64, purpose: Purpose) -> Self {
        debug_assert!(task < (1 << 56));
        StreamId {
            seed,
            stream: (task << 8) | purpose as u64,
        }
    }

    /// Same task, different purpose.
    pub fn with_purpose(self, purpose: Purpose) -> Self {
        StreamId {
            seed: self.seed,
            stream: (self.stream & !0xff) | purpose as u64,
        }
    }

    pub fn task(self) -> u64 {
        self.stream >> 8
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}
