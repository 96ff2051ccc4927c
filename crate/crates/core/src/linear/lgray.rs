use std::sync::Arc;

use super::{count_codewords, LinearCodec};
use crate::bitcore::{hamming_unchecked, BitString};
use crate::codes::{unary_decode, Codec, CodecParams, SharedCodec, TieBreakPolicy};
use crate::error::{invalid, Error, Result};

/// Three copies of an inner codeword, decoded by the median of the three
/// component decodes.
#[derive(Clone, Debug)]
pub struct RepeatCode {
    inner: SharedCodec,
}

pub(crate) fn median3(mut v: [u64; 3]) -> u64 {
    v.sort_unstable();
    v[1]
}

impl RepeatCode {
    pub fn new(inner: SharedCodec) -> Self {
        RepeatCode { inner }
    }

    pub fn component_decodes(&self, c: &BitString) -> Result<[u64; 3]> {
        let d = self.inner.params().block_len;
        c.expect_len(3 * d)?;
        Ok([
            self.inner.decode(&c.slice0(0, d))?,
            self.inner.decode(&c.slice0(d, 2 * d))?,
            self.inner.decode(&c.slice0(2 * d, 3 * d))?,
        ])
    }
}

impl Codec for RepeatCode {
    fn params(&self) -> CodecParams {
        let p = self.inner.params();
        CodecParams {
            messages: p.messages,
            block_len: 3 * p.block_len,
            distance: 3 * p.distance,
        }
    }

    fn encode(&self, v: u64) -> Result<BitString> {
        let c = self.inner.encode(v)?;
        Ok(BitString::concat_all([&c, &c, &c]))
    }

    fn decode(&self, c: &BitString) -> Result<u64> {
        Ok(median3(self.component_decodes(c)?))
    }

    fn descriptor(&self) -> String {
        format!("repeat3:inner=({})", self.inner.descriptor())
    }
}

/// Gray code over three copies of a linear code, without parity padding.
///
/// Block `l` spans the `s_l = 3 H(C(l), C(l+1))` values starting at
/// `3 cum(l)`, with `cum` the running adjacent distance of the inner code.
#[derive(Clone, Debug)]
pub struct LinearGrayCode {
    code: Arc<LinearCodec>,
    repeat: RepeatCode,
    inner_messages: u64,
    max_value: u64,
}

impl LinearGrayCode {
    pub fn new(code: Arc<LinearCodec>) -> Result<Self> {
        let inner_messages = code.params().messages;
        let max_value = count_codewords(inner_messages - 1, code.generator())
            .checked_mul(3)
            .ok_or_else(|| invalid("message range overflows 64 bits"))?;
        Ok(LinearGrayCode {
            repeat: RepeatCode::new(code.clone()),
            code,
            inner_messages,
            max_value,
        })
    }

    pub fn max_value(&self) -> u64 {
        self.max_value
    }

    pub fn inner(&self) -> &Arc<LinearCodec> {
        &self.code
    }

    pub fn repeat(&self) -> &RepeatCode {
        &self.repeat
    }

    /// `cum(t)`: total adjacent distance of the inner code up to message `t`.
    pub fn cumulative(&self, t: u64) -> u64 {
        count_codewords(t, self.code.generator())
    }

    /// Width of block `l` in values, `3 H(C(l), C(l+1))`.
    pub fn step(&self, l: u64) -> Result<u64> {
        Ok(self.diff(l)?.weight() as u64)
    }

    /// Sorted 1-based positions where `W(l)` and `W(l+1)` differ.
    pub fn diff_index(&self, l: u64) -> Result<Vec<usize>> {
        Ok(self.diff(l)?.one_positions().collect())
    }

    fn diff(&self, l: u64) -> Result<BitString> {
        if l + 1 >= self.inner_messages {
            return Err(Error::ValueOutOfRange {
                value: l,
                limit: self.inner_messages - 1,
            });
        }
        self.repeat.encode(l)?.xor(&self.repeat.encode(l + 1)?)
    }

    /// The block `l` holding `v` and the offset `r = v - 3 cum(l)`, by binary
    /// search over `cum`.
    pub fn find_block(&self, v: u64) -> Result<(u64, u64)> {
        self.params().check_value(v)?;
        let (mut lo, mut hi) = (0u64, self.inner_messages - 1);
        // invariant: 3 cum(lo) <= v < 3 cum(hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if 3 * self.cumulative(mid) <= v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo, v - 3 * self.cumulative(lo)))
    }

    fn transition_offset(&self, c: &BitString, l: u64) -> Result<u64> {
        let high = self.repeat.encode(l + 1)?;
        let diff = self.diff(l)?;
        let h = BitString::from_bools(
            &diff
                .one_indices0()
                .map(|i| c.get0(i) == high.get0(i))
                .collect::<Vec<_>>(),
        );
        Ok(unary_decode(&h, &mut TieBreakPolicy::Smallest))
    }

    pub fn candidates(&self, c: &BitString) -> Result<(Option<u64>, Option<u64>)> {
        c.expect_len(self.params().block_len)?;
        let t = self.repeat.decode(c)?;
        let clamp = |v: u64| v.min(self.max_value - 1);
        let v0 = if t >= 1 {
            Some(clamp(
                3 * self.cumulative(t - 1) + self.transition_offset(c, t - 1)?,
            ))
        } else {
            None
        };
        let v1 = if t + 1 < self.inner_messages {
            Some(clamp(
                3 * self.cumulative(t) + self.transition_offset(c, t)?,
            ))
        } else {
            None
        };
        Ok((v0, v1))
    }
}

impl Codec for LinearGrayCode {
    fn params(&self) -> CodecParams {
        CodecParams {
            messages: self.max_value,
            block_len: 3 * self.code.params().block_len,
            distance: 1,
        }
    }

    fn encode(&self, v: u64) -> Result<BitString> {
        let (l, r) = self.find_block(v)?;
        let low = self.repeat.encode(l)?;
        let high = self.repeat.encode(l + 1)?;
        let cut = if r == 0 {
            0
        } else {
            low.xor(&high)?
                .one_indices0()
                .nth(r as usize - 1)
                .expect("offset below block width")
                + 1
        };
        Ok(high.slice0(0, cut).concat(&low.slice0(cut, low.len())))
    }

    fn decode(&self, c: &BitString) -> Result<u64> {
        let (v0, v1) = self.candidates(c)?;
        let mut best: Option<(usize, u64)> = None;
        for v in [v0, v1].into_iter().flatten() {
            let dist = hamming_unchecked(c, &self.encode(v)?);
            if best.is_none_or(|b| (dist, v) < b) {
                best = Some((dist, v));
            }
        }
        Ok(best.expect("at least two inner messages").1)
    }

    fn descriptor(&self) -> String {
        format!("lgray:inner=({})", self.code.descriptor())
    }

    fn zero_maps_to_zero(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::hamming;
    use crate::linear::GeneratorMatrix;

    fn small() -> LinearGrayCode {
        let g = GeneratorMatrix::from_rows_text(&["101", "011"]).unwrap();
        LinearGrayCode::new(Arc::new(LinearCodec::ml(g).unwrap())).unwrap()
    }

    #[test]
    fn find_block_examples() {
        let lg = small();
        assert_eq!(lg.max_value(), 18);
        assert_eq!(lg.find_block(0).unwrap(), (0, 0));
        assert_eq!(lg.find_block(7).unwrap(), (1, 1));
        assert_eq!(lg.find_block(17).unwrap(), (2, 5));
        assert!(lg.find_block(18).is_err());
        for l in 0..3 {
            assert_eq!(lg.step(l).unwrap(), 6);
        }
    }

    #[test]
    fn median_examples() {
        assert_eq!(median3([3, 3, 3]), 3);
        assert_eq!(median3([5, 2, 3]), 3);
        assert_eq!(median3([2, 3, 3]), 3);
    }

    #[test]
    fn exhaustive_axioms_small() {
        let lg = small();
        let words: Vec<BitString> = (0..18).map(|v| lg.encode(v).unwrap()).collect();
        for v in 0..18 {
            assert_eq!(lg.decode(&words[v as usize]).unwrap(), v);
            if v + 1 < 18 {
                assert_eq!(
                    hamming(&words[v as usize], &words[v as usize + 1]).unwrap(),
                    1
                );
            }
        }
        let distinct: std::collections::BTreeSet<String> =
            words.iter().map(|w| w.to_string()).collect();
        assert_eq!(distinct.len(), 18);
        assert_eq!(words[0], BitString::zeros(9));
    }
}
