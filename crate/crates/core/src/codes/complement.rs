use super::{Codec, CodecParams, SharedCodec, TieBreakPolicy};
use crate::bitcore::BitString;
use crate::error::Result;

/// Even messages keep the inner codeword and get a `0^D` tail; odd messages
/// are bitwise inverted and get a `1^D` tail.
#[derive(Clone, Debug)]
pub struct ComplementCode {
    inner: SharedCodec,
}

impl ComplementCode {
    pub fn new(inner: SharedCodec) -> Self {
        ComplementCode { inner }
    }

    pub fn inner(&self) -> &SharedCodec {
        &self.inner
    }

    /// Decodes using the tail majority to pick the branch; an exactly
    /// balanced tail is resolved by `ties` (smallest = the even branch).
    pub fn decode_with(&self, ct: &BitString, ties: &mut TieBreakPolicy) -> Result<u64> {
        let inner = self.inner.params();
        ct.expect_len(inner.block_len + inner.distance)?;
        let c = ct.slice0(0, inner.block_len);
        let tail_ones = ct.slice0(inner.block_len, ct.len()).weight();
        let tail_zeros = inner.distance - tail_ones;
        let odd_branch = match tail_ones.cmp(&tail_zeros) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => ties.pick(2) == 1,
        };
        if odd_branch {
            self.inner.decode(&c.complement())
        } else {
            self.inner.decode(&c)
        }
    }
}

impl Codec for ComplementCode {
    fn params(&self) -> CodecParams {
        let inner = self.inner.params();
        CodecParams {
            messages: inner.messages,
            block_len: inner.block_len + inner.distance,
            distance: inner.distance,
        }
    }

    fn encode(&self, v: u64) -> Result<BitString> {
        let c = self.inner.encode(v)?;
        let dist = self.inner.params().distance;
        Ok(if v % 2 == 0 {
            c.concat(&BitString::zeros(dist))
        } else {
            c.complement().concat(&BitString::ones(dist))
        })
    }

    fn decode(&self, c: &BitString) -> Result<u64> {
        self.decode_with(c, &mut TieBreakPolicy::Smallest)
    }

    fn descriptor(&self) -> String {
        format!("complement:inner=({})", self.inner.descriptor())
    }
}
