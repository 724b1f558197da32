//! Rayleigh-fading channel draws from counter-based random streams.
//!
//! Every `h_{i,j}` is `CN(0,1)`, so each squared magnitude is a unit-mean
//! exponential. Draws are produced by ChaCha8 keyed with the run seed, with
//! the ChaCha stream id selecting an independent substream. Within a
//! substream each [`ChannelDraw`] consumes exactly four 64-bit outputs, so the
//! k-th draw can be reached by seeking instead of replaying.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of consecutive sample indices served by one substream.
pub const BATCH_SIZE: u64 = 1 << 16;

/// 32-bit ChaCha words consumed per [`ChannelDraw`] (four `u64` outputs).
const WORDS_PER_DRAW: u128 = 8;

/// One realization of the four squared channel gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    /// `|h_{S,R}|^2`
    pub g_sr: f64,
    /// `|h_{R,D}|^2`
    pub g_rd: f64,
    /// `|h_{S,E}|^2`
    pub g_se: f64,
    /// `|h_{R,E}|^2`
    pub g_re: f64,
}

impl ChannelDraw {
    pub fn new(g_sr: f64, g_rd: f64, g_se: f64, g_re: f64) -> crate::Result<Self> {
        use crate::model::require_non_negative;
        Ok(Self {
            g_sr: require_non_negative("g_sr", g_sr)?,
            g_rd: require_non_negative("g_rd", g_rd)?,
            g_se: require_non_negative("g_se", g_se)?,
            g_re: require_non_negative("g_re", g_re)?,
        })
    }

    /// Swaps the roles of the two hops: `g_sr <-> g_rd` and `g_se <-> g_re`.
    pub fn mirrored(self) -> Self {
        Self {
            g_sr: self.g_rd,
            g_rd: self.g_sr,
            g_se: self.g_re,
            g_re: self.g_se,
        }
    }
}

/// A deterministic substream identified by `(seed, stream_index)`.
#[derive(Debug, Clone)]
pub struct SampleStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl SampleStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        Self {
            seed,
            stream_index,
            rng,
        }
    }

    /// Positions the stream so the next [`sample_draw`](Self::sample_draw)
    /// returns the draw at `offset` within the substream.
    pub fn at_draw(seed: u64, stream_index: u64, offset: u64) -> Self {
        let mut stream = Self::new(seed, stream_index);
        stream.rng.set_word_pos(u128::from(offset) * WORDS_PER_DRAW);
        stream
    }

    /// Stream and offset serving global sample index `k`.
    pub fn for_sample(seed: u64, k: u64) -> Self {
        Self::at_draw(seed, k / BATCH_SIZE, k % BATCH_SIZE)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    fn next_unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One unit-mean exponential by CDF inversion, `-ln(1 - U)`.
    pub fn sample_exponential_unit(&mut self) -> f64 {
        -(-self.next_unit()).ln_1p()
    }

    /// Four independent unit-mean exponentials.
    pub fn sample_draw(&mut self) -> ChannelDraw {
        ChannelDraw {
            g_sr: self.sample_exponential_unit(),
            g_rd: self.sample_exponential_unit(),
            g_se: self.sample_exponential_unit(),
            g_re: self.sample_exponential_unit(),
        }
    }
}

/// The draw for global sample index `k` of a run seeded with `seed`.
pub fn draw_at(seed: u64, k: u64) -> ChannelDraw {
    SampleStream::for_sample(seed, k).sample_draw()
}
