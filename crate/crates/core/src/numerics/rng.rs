//! Counter-based random streams.
//!
//! A stream is identified by `(master_seed, stream_index)`. The generator is
//! ChaCha8 with
//!
//! * key: the four 64-bit words `splitmix64(master_seed + j·0x9E3779B97F4A7C15)`,
//!   `j = 0..4`, each written little-endian into the 32-byte seed, and
//! * stream id (the ChaCha nonce): `stream_index`.
//!
//! Distinct indices under one master seed therefore select disjoint ChaCha
//! streams, and the mapping is the same on every platform. Nested families
//! (one per check, one per replicate inside it) use [`RngStream::child_seed`]
//! as the master seed of the inner family.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 finaliser (a bijection on `u64`).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn derive(master_seed: u64, stream_index: u64) -> Self {
        Self { master_seed, stream_index }
    }

    fn key(&self) -> [u8; 32] {
        let mut key = [0u8; 32];
        for (j, chunk) in key.chunks_exact_mut(8).enumerate() {
            let word = splitmix64(self.master_seed.wrapping_add((j as u64).wrapping_mul(GOLDEN)));
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        key
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::from_seed(self.key());
        rng.set_stream(self.stream_index);
        rng
    }

    /// Stream `index` of the same family.
    pub fn sibling(&self, index: u64) -> Self {
        Self { master_seed: self.master_seed, stream_index: index }
    }

    /// Master seed for a nested family owned by this stream:
    /// `splitmix64(master_seed ^ splitmix64(stream_index))`.
    pub fn child_seed(&self) -> u64 {
        splitmix64(self.master_seed ^ splitmix64(self.stream_index))
    }

    /// Stream `index` of the nested family owned by this stream.
    pub fn child(&self, index: u64) -> Self {
        Self::derive(self.child_seed(), index)
    }
}
