use std::sync::Arc;

use super::decoders::{DecodedWord, DecoderOptions, DecoderRegistry, LinearDecoder, MlDecoder};
use super::{exact_distance, GeneratorMatrix};
use crate::bitcore::BitString;
use crate::codes::{Codec, CodecParams};
use crate::error::{invalid, Result};

/// A linear code with a pluggable hard-decision decoder.
///
/// As a [`Codec`] it carries `2^message_bits` messages. `message_bits` may be
/// smaller than the generator's row count, which restricts the code to the
/// subcode spanned by the first rows (used to fit long codes into `u64`
/// messages).
#[derive(Clone, Debug)]
pub struct LinearCodec {
    generator: GeneratorMatrix,
    decoder: Arc<dyn LinearDecoder>,
    distance: usize,
    message_bits: usize,
    descriptor: Option<String>,
}

impl LinearCodec {
    /// Exhaustive ML decoding with the exact distance computed up front.
    pub fn ml(generator: GeneratorMatrix) -> Result<Self> {
        MlDecoder::new(&generator)?;
        let decoder =
            DecoderRegistry::with_builtins().build("ml", &generator, &DecoderOptions::default())?;
        let distance = exact_distance(&generator)?;
        LinearCodec::with_decoder(generator, decoder, distance)
    }

    pub fn with_decoder(
        generator: GeneratorMatrix,
        decoder: Arc<dyn LinearDecoder>,
        distance: usize,
    ) -> Result<Self> {
        let message_bits = generator.message_bits().min(62);
        CodecParams::new(1 << message_bits, generator.block_len(), distance)?;
        Ok(LinearCodec {
            generator,
            decoder,
            distance,
            message_bits,
            descriptor: None,
        })
    }

    /// Restricts messages to `0..2^bits`.
    pub fn limit_message_bits(mut self, bits: usize) -> Result<Self> {
        if bits == 0 || bits > self.generator.message_bits() || bits > 62 {
            return Err(invalid(format!(
                "message bits {bits} must lie in 1..={}",
                self.generator.message_bits().min(62)
            )));
        }
        self.message_bits = bits;
        Ok(self)
    }

    pub(crate) fn set_descriptor(&mut self, d: String) {
        self.descriptor = Some(d);
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }

    pub fn decoder(&self) -> &Arc<dyn LinearDecoder> {
        &self.decoder
    }

    pub fn message_bits(&self) -> usize {
        self.message_bits
    }

    /// Full decoder output, including the convergence flag.
    pub fn decode_word(&self, c: &BitString) -> Result<DecodedWord> {
        c.expect_len(self.generator.block_len())?;
        self.decoder.decode_word(c)
    }
}

impl Codec for LinearCodec {
    fn params(&self) -> CodecParams {
        CodecParams {
            messages: 1 << self.message_bits,
            block_len: self.generator.block_len(),
            distance: self.distance,
        }
    }

    fn encode(&self, v: u64) -> Result<BitString> {
        self.params().check_value(v)?;
        self.generator.encode_u64(v)
    }

    /// Messages outside the subcode are reported by their low bits.
    fn decode(&self, c: &BitString) -> Result<u64> {
        let out = self.decode_word(c)?;
        let low = out.message.slice0(0, self.message_bits);
        Ok(low.to_u64_lsb_first().expect("at most 62 bits"))
    }

    fn descriptor(&self) -> String {
        self.descriptor.clone().unwrap_or_else(|| {
            let rows: Vec<String> = self
                .generator
                .rows()
                .iter()
                .map(|r| r.to_string())
                .collect();
            format!(
                "linear:rows={},decoder={}",
                rows.join("/"),
                self.decoder.name()
            )
        })
    }

    fn zero_maps_to_zero(&self) -> bool {
        true
    }
}
