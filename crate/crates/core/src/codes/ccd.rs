use super::{Codec, CodecParams, ComplementCode, SharedCodec};
use crate::bitcore::BitString;
use crate::error::Result;

/// `C(v) L(v) C(v) L(v)` where `L` is the complement code of `C`.
///
/// Consecutive codewords differ in exactly `2 (d + D)` bits, and decoding
/// survives one of the four components being replaced outright.
#[derive(Clone, Debug)]
pub struct ConstantDistanceCode {
    inner: SharedCodec,
    complement: ComplementCode,
}

impl ConstantDistanceCode {
    pub fn new(inner: SharedCodec) -> Self {
        ConstantDistanceCode {
            complement: ComplementCode::new(inner.clone()),
            inner,
        }
    }

    pub fn inner(&self) -> &SharedCodec {
        &self.inner
    }

    /// Bit offsets (0-based, exclusive ends) of `C | L | C | L`.
    fn bounds(&self) -> [usize; 5] {
        let p = self.inner.params();
        let (d, l) = (p.block_len, p.block_len + p.distance);
        [0, d, d + l, 2 * d + l, 2 * d + 2 * l]
    }

    /// Decodes of `c1, l1, c2, l2`, in that order.
    pub fn component_decodes(&self, c: &BitString) -> Result<[u64; 4]> {
        let b = self.bounds();
        c.expect_len(b[4])?;
        Ok([
            self.inner.decode(&c.slice0(b[0], b[1]))?,
            self.complement.decode(&c.slice0(b[1], b[2]))?,
            self.inner.decode(&c.slice0(b[2], b[3]))?,
            self.complement.decode(&c.slice0(b[3], b[4]))?,
        ])
    }
}

/// Most frequent of the four decodes. Among equally frequent values, one
/// produced by a plain inner copy wins, then the smaller value.
pub(crate) fn plurality(votes: [u64; 4]) -> u64 {
    let count = |x: u64| votes.iter().filter(|&&y| y == x).count();
    let from_plain = |x: u64| x == votes[0] || x == votes[2];
    *votes
        .iter()
        .max_by(|&&a, &&b| {
            count(a)
                .cmp(&count(b))
                .then(from_plain(a).cmp(&from_plain(b)))
                .then(b.cmp(&a))
        })
        .expect("four votes")
}

impl Codec for ConstantDistanceCode {
    fn params(&self) -> CodecParams {
        let p = self.inner.params();
        CodecParams {
            messages: p.messages,
            block_len: 4 * p.block_len + 2 * p.distance,
            // same-parity pairs differ by 4 H(C) >= 4D, opposite parity by 2(d + D)
            distance: 4 * p.distance,
        }
    }

    fn encode(&self, v: u64) -> Result<BitString> {
        let c = self.inner.encode(v)?;
        let l = self.complement.encode(v)?;
        Ok(BitString::concat_all([&c, &l, &c, &l]))
    }

    fn decode(&self, c: &BitString) -> Result<u64> {
        Ok(plurality(self.component_decodes(c)?))
    }

    fn descriptor(&self) -> String {
        format!("ccd:inner=({})", self.inner.descriptor())
    }
}
