use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Counter-based generator used everywhere a draw is needed.
pub type StreamRng = ChaCha8Rng;

/// Identifies an independent random stream by `(seed, stream_index)`.
///
/// The ChaCha key is derived from both values; sub-streams (one per simulated
/// cell) select the ChaCha stream id, and the block counter indexes draws
/// within a sub-stream. Every sequence is therefore a pure function of
/// `(seed, stream_index, substream, draw number)`, independent of the order in
/// which sub-streams are consumed or which thread consumes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub const fn new(seed: u64, stream_index: u64) -> Self {
        Self { seed, stream_index }
    }

    fn key(&self) -> [u8; 32] {
        let mut key = [0u8; 32];
        let words = [
            splitmix64(self.seed),
            splitmix64(self.stream_index ^ 0x6a09_e667_f3bc_c908),
            self.seed,
            self.stream_index,
        ];
        for (chunk, w) in key.chunks_exact_mut(8).zip(words) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        key
    }

    /// Generator for sub-stream 0.
    pub fn generator(&self) -> StreamRng {
        self.substream(0)
    }

    /// Generator for an arbitrary sub-stream id.
    pub fn substream(&self, id: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::from_seed(self.key());
        rng.set_stream(id);
        rng
    }
}

/// SplitMix64 finaliser; also used to derive per-cell sub-stream ids.
pub const fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
