//! Linear codes over GF(2): generator matrices, decoding strategies, the
//! adjacent-distance counter, the three-copy Gray code and random regular
//! parity-check codes with bit-flip decoding.

mod codec;
mod count;
mod decoders;
mod expander;
mod lgray;
mod matrix;

pub use codec::LinearCodec;
pub use count::{count_codewords, count_codewords_brute_force, exact_distance};
pub use decoders::{
    BitFlipDecoder, DecodedWord, DecoderFactory, DecoderOptions, DecoderRegistry, FlipSchedule,
    LinearDecoder, MlDecoder, ParityChecks, SyndromeDecoder, ML_MAX_MESSAGE_BITS,
    SYNDROME_MAX_REDUNDANCY,
};
pub use expander::{expander_build, ExpanderCode, ExpanderConfig};
pub use lgray::{LinearGrayCode, RepeatCode};
pub use matrix::GeneratorMatrix;

use crate::bitcore::{BitString, RandomSource};
use crate::error::Result;

/// Uniformly random full-rank `n x d` generator.
pub fn random_generator(n: usize, d: usize, rng: &mut RandomSource) -> Result<GeneratorMatrix> {
    use rand::Rng;
    loop {
        let rows: Vec<BitString> = (0..n)
            .map(|_| BitString::from_fn(d, |_| rng.random::<bool>()))
            .collect();
        if matrix::rank(&rows) == n {
            return GeneratorMatrix::new(rows);
        }
    }
}
