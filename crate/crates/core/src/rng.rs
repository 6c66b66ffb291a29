//! Counter-based random substreams.
//!
//! Word `i` of stream `s` under master seed `m` is `mix(key(m, s) + i * GAMMA)`
//! where `mix` is the SplitMix64 finalizer. There is no hidden state beyond
//! the counter, so a path simulated on any worker draws the same numbers.
//! Normals come from the ziggurat sampler in `rand_distr` applied to the
//! word sequence, so normal draw `i` of a stream is fixed by `(m, s, i)`.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn stream_key(seed: u64, stream: u64) -> u64 {
    mix64(mix64(seed ^ 0x6a09_e667_f3bc_c909).wrapping_add(mix64(stream.wrapping_mul(GAMMA) ^ 0xbb67_ae85_84ca_a73b)))
}

/// Raw 64-bit word `index` of substream `stream`.
pub fn word_at(seed: u64, stream: u64, index: u64) -> u64 {
    mix64(stream_key(seed, stream).wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA)))
}

/// A sequential reader over one substream.
#[derive(Debug, Clone)]
pub struct StreamRng {
    key: u64,
    counter: u64,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self {
            key: stream_key(seed, stream),
            counter: 0,
        }
    }

    /// Number of 64-bit words consumed so far.
    pub fn position(&self) -> u64 {
        self.counter
    }

    /// Standard normal draw.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }
}

impl RngCore for StreamRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}
