use super::{Codec, CodecParams};
use crate::bitcore::BitString;
use crate::error::{invalid, Result};

/// `d`-fold repetition of a single bit; majority decoding, ties to 0.
#[derive(Clone, Debug)]
pub struct RepetitionCode {
    len: usize,
}

impl RepetitionCode {
    pub fn new(len: usize) -> Result<Self> {
        CodecParams::new(2, len, len)?;
        Ok(RepetitionCode { len })
    }
}

impl Codec for RepetitionCode {
    fn params(&self) -> CodecParams {
        CodecParams {
            messages: 2,
            block_len: self.len,
            distance: self.len,
        }
    }

    fn encode(&self, v: u64) -> Result<BitString> {
        self.params().check_value(v)?;
        Ok(if v == 1 {
            BitString::ones(self.len)
        } else {
            BitString::zeros(self.len)
        })
    }

    fn decode(&self, c: &BitString) -> Result<u64> {
        c.expect_len(self.len)?;
        Ok(u64::from(2 * c.weight() > self.len))
    }

    fn descriptor(&self) -> String {
        format!("repetition:d={}", self.len)
    }
}

/// Each of `bits` message bits repeated `reps` times, most significant bit
/// first. With `bits = 2, reps = 3` this is the pair-triple code
/// `v1 v1 v1 v0 v0 v0`.
#[derive(Clone, Debug)]
pub struct BitRepetitionCode {
    bits: usize,
    reps: usize,
}

impl BitRepetitionCode {
    pub fn new(bits: usize, reps: usize) -> Result<Self> {
        if bits == 0 || bits > 20 {
            return Err(invalid(format!("bits must lie in 1..=20, got {bits}")));
        }
        CodecParams::new(1 << bits, bits * reps, reps)?;
        Ok(BitRepetitionCode { bits, reps })
    }

    pub fn pair_triple() -> Self {
        BitRepetitionCode { bits: 2, reps: 3 }
    }
}

impl Codec for BitRepetitionCode {
    fn params(&self) -> CodecParams {
        CodecParams {
            messages: 1 << self.bits,
            block_len: self.bits * self.reps,
            distance: self.reps,
        }
    }

    fn encode(&self, v: u64) -> Result<BitString> {
        self.params().check_value(v)?;
        let (bits, reps) = (self.bits, self.reps);
        Ok(BitString::from_fn(bits * reps, |i| {
            let which = bits - 1 - i / reps;
            (v >> which) & 1 == 1
        }))
    }

    fn decode(&self, c: &BitString) -> Result<u64> {
        c.expect_len(self.bits * self.reps)?;
        let mut v = 0u64;
        for group in 0..self.bits {
            let ones = (0..self.reps)
                .filter(|&j| c.get0(group * self.reps + j))
                .count();
            v = (v << 1) | u64::from(2 * ones > self.reps);
        }
        Ok(v)
    }

    fn descriptor(&self) -> String {
        if self.bits == 2 && self.reps == 3 {
            "pairtriple".to_string()
        } else {
            format!("bitrep:bits={},reps={}", self.bits, self.reps)
        }
    }
}
