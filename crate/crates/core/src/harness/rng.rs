//! Counter-keyed random substreams.
//!
//! Each (seed, purpose, block, user) key hashes to its own ChaCha seed, so
//! a draw never depends on which worker ran first or on how many draws
//! another key consumed. The scheme is not part of the key: every scheme
//! sees the same payloads, channels and noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Payload,
    Channel,
    Noise,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Payload => 0x7061_796c,
            Purpose::Channel => 0x6368_616e,
            Purpose::Noise => 0x6e6f_6973,
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn substream(seed: u64, purpose: Purpose, block: u64, user: u64) -> ChaCha8Rng {
    let mut h = splitmix(seed);
    for word in [purpose.tag(), block, user] {
        h = splitmix(h ^ word);
    }
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
        chunk.copy_from_slice(&splitmix(h.wrapping_add(i as u64)).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
