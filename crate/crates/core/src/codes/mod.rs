//! Black-box code constructions: unary, complement, constant consecutive
//! distance, and the error-correcting Gray code built on top of them.
//!
//! Every code implements [`Codec`] and is shared as [`SharedCodec`] so that
//! constructions can nest arbitrary inner codes chosen at runtime.

mod ccd;
mod complement;
mod gray;
mod simple;
mod unary;

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::bitcore::{BitString, RandomSource};
use crate::error::{invalid, Error, Result};

pub use ccd::ConstantDistanceCode;
pub use complement::ComplementCode;
pub use gray::GrayCode;
pub use simple::{BitRepetitionCode, RepetitionCode};
pub use unary::{unary_decode, unary_encode, UnaryCode};

/// Message count, block length and declared distance of a code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CodecParams {
    /// Number of encodable messages `m`; messages are `0..m`.
    pub messages: u64,
    /// Block length `d` in bits.
    pub block_len: usize,
    /// Declared minimum distance. Exact for the primitive codes, a lower
    /// bound for composed ones.
    pub distance: usize,
}

impl CodecParams {
    pub fn new(messages: u64, block_len: usize, distance: usize) -> Result<Self> {
        if messages < 2 {
            return Err(invalid(format!(
                "a code needs at least 2 messages, got {messages}"
            )));
        }
        if block_len == 0 {
            return Err(invalid("block length must be positive"));
        }
        if distance == 0 || distance > block_len {
            return Err(invalid(format!(
                "distance {distance} must lie in 1..={block_len}"
            )));
        }
        Ok(CodecParams {
            messages,
            block_len,
            distance,
        })
    }

    pub fn check_value(&self, v: u64) -> Result<()> {
        if v >= self.messages {
            return Err(Error::ValueOutOfRange {
                value: v,
                limit: self.messages,
            });
        }
        Ok(())
    }
}

/// An encoder/decoder pair with `decode(encode(v)) == v` for every message.
pub trait Codec: Send + Sync + fmt::Debug {
    fn params(&self) -> CodecParams;

    fn encode(&self, v: u64) -> Result<BitString>;

    fn decode(&self, c: &BitString) -> Result<u64>;

    /// Canonical inline descriptor, parseable by the codec registry.
    fn descriptor(&self) -> String;

    /// Whether `encode(0)` is the all-zero word. Defaults to checking directly.
    fn zero_maps_to_zero(&self) -> bool {
        self.encode(0).map(|c| c.weight() == 0).unwrap_or(false)
    }
}

pub type SharedCodec = Arc<dyn Codec>;

/// How exact ties between decoding candidates are resolved.
#[derive(Clone, Debug, Default)]
pub enum TieBreakPolicy {
    /// Pick the first (smallest) candidate.
    #[default]
    Smallest,
    /// Pick uniformly among the tied candidates.
    Random(RandomSource),
}

impl TieBreakPolicy {
    /// Index in `0..n` of the candidate to keep.
    pub fn pick(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        match self {
            TieBreakPolicy::Smallest => 0,
            TieBreakPolicy::Random(rng) => rng.random_range(0..n),
        }
    }
}
