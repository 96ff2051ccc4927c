use super::{unary_decode, Codec, CodecParams, ConstantDistanceCode, SharedCodec, TieBreakPolicy};
use crate::bitcore::{hamming_unchecked, BitString};
use crate::error::{invalid, Error, Result};

/// Sensitivity-1 code interpolating between consecutive codewords of the
/// constant consecutive distance code `K`.
///
/// Value `v = q g + r` is the first `b_r` bits of `K(q+1)` followed by the
/// remaining bits of `K(q)`, where `b_1 < ... < b_g` are the positions at
/// which `K(q)` and `K(q+1)` differ and `b_0 = 0`.
#[derive(Clone, Debug)]
pub struct GrayCode {
    ccd: ConstantDistanceCode,
    step: u64,
    block_len: usize,
    inner_messages: u64,
    max_value: u64,
}

impl GrayCode {
    pub fn new(inner: SharedCodec) -> Result<Self> {
        let p = inner.params();
        let step = 2 * (p.block_len + p.distance) as u64;
        let max_value = (p.messages - 1)
            .checked_mul(step)
            .ok_or_else(|| invalid("message range overflows 64 bits"))?;
        Ok(GrayCode {
            ccd: ConstantDistanceCode::new(inner),
            step,
            block_len: 4 * p.block_len + 2 * p.distance,
            inner_messages: p.messages,
            max_value,
        })
    }

    /// Bits flipped per inner message step, `g = 2 (d + D)`.
    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// One past the largest encodable value, `(m - 1) g`.
    pub fn max_value(&self) -> u64 {
        self.max_value
    }

    pub fn ccd(&self) -> &ConstantDistanceCode {
        &self.ccd
    }

    /// Sorted 1-based positions where `K(q)` and `K(q+1)` differ.
    pub fn diff_index(&self, q: u64) -> Result<Vec<usize>> {
        if q + 1 >= self.inner_messages {
            return Err(Error::ValueOutOfRange {
                value: q,
                limit: self.inner_messages - 1,
            });
        }
        let a = self.ccd.encode(q)?;
        let b = self.ccd.encode(q + 1)?;
        Ok(a.xor(&b)?.one_positions().collect())
    }

    fn compose(&self, q: u64, r: u64, low: &BitString, high: &BitString) -> BitString {
        let cut = if r == 0 {
            0
        } else {
            low.xor(high)
                .expect("equal lengths")
                .one_indices0()
                .nth(r as usize - 1)
                .map(|i| i + 1)
                .unwrap_or_else(|| panic!("step {q} has fewer than {r} differing bits"))
        };
        high.slice0(0, cut).concat(&low.slice0(cut, self.block_len))
    }

    /// Unary read-out of `c` along the transition `K(q) -> K(q+1)`.
    fn transition_offset(&self, c: &BitString, q: u64) -> Result<u64> {
        let low = self.ccd.encode(q)?;
        let high = self.ccd.encode(q + 1)?;
        let diff = low.xor(&high)?;
        let h = BitString::from_bools(
            &diff
                .one_indices0()
                .map(|i| c.get0(i) == high.get0(i))
                .collect::<Vec<_>>(),
        );
        Ok(unary_decode(&h, &mut TieBreakPolicy::Smallest))
    }

    /// Both decoding candidates (`v0` from `h_{t-1}`, `v1` from `h_t`),
    /// clamped into `[0, M)`; a candidate is absent at the range ends.
    pub fn candidates(&self, c: &BitString) -> Result<(Option<u64>, Option<u64>)> {
        c.expect_len(self.block_len)?;
        let t = self.ccd.decode(c)?;
        let clamp = |v: u64| v.min(self.max_value - 1);
        let v0 = if t >= 1 {
            Some(clamp(
                self.step * (t - 1) + self.transition_offset(c, t - 1)?,
            ))
        } else {
            None
        };
        let v1 = if t + 1 < self.inner_messages {
            Some(clamp(self.step * t + self.transition_offset(c, t)?))
        } else {
            None
        };
        Ok((v0, v1))
    }
}

impl Codec for GrayCode {
    fn params(&self) -> CodecParams {
        CodecParams {
            messages: self.max_value,
            block_len: self.block_len,
            distance: 1,
        }
    }

    fn encode(&self, v: u64) -> Result<BitString> {
        self.params().check_value(v)?;
        let (q, r) = (v / self.step, v % self.step);
        let low = self.ccd.encode(q)?;
        let high = self.ccd.encode(q + 1)?;
        Ok(self.compose(q, r, &low, &high))
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
        format!("gray:inner=({})", self.ccd.inner().descriptor())
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::bitcore::hamming;
    use crate::codes::{BitRepetitionCode, RepetitionCode};

    fn pair_triple_gray() -> GrayCode {
        GrayCode::new(Arc::new(BitRepetitionCode::pair_triple())).unwrap()
    }

    #[test]
    fn layout_examples() {
        let g = pair_triple_gray();
        assert_eq!(g.step(), 18);
        assert_eq!(g.block_len(), 30);
        assert_eq!(g.max_value(), 54);
        assert_eq!(
            g.diff_index(0).unwrap(),
            vec![4, 5, 6, 7, 8, 9, 13, 14, 15, 19, 20, 21, 22, 23, 24, 28, 29, 30]
        );
        for q in 0..3 {
            let idx = g.diff_index(q).unwrap();
            assert_eq!(idx.len(), 18);
            assert!(idx.windows(2).all(|w| w[0] < w[1]));
            assert!(idx.iter().all(|&i| (1..=30).contains(&i)));
        }
        assert!(g.diff_index(3).is_err());
    }

    #[test]
    fn encode_examples() {
        let g = pair_triple_gray();
        assert_eq!(g.encode(0).unwrap(), BitString::zeros(30));
        assert_eq!(
            g.encode(1).unwrap(),
            BitString::zeros(30).with_bit(4, true).unwrap()
        );
        assert_eq!(g.encode(18).unwrap(), g.ccd().encode(1).unwrap());
        assert!(g.encode(54).is_err());
    }

    #[test]
    fn exhaustive_roundtrip_and_single_flips() {
        let g = pair_triple_gray();
        for v in 0..54 {
            let c = g.encode(v).unwrap();
            assert_eq!(g.decode(&c).unwrap(), v);
            for pos in 1..=30 {
                // the winner is within distance 1 of the received word, hence
                // within 2 of the sent codeword
                let w = g.decode(&c.flipped(pos).unwrap()).unwrap();
                assert!(hamming(&c, &g.encode(w).unwrap()).unwrap() <= 2);
                assert!(w.abs_diff(v) <= 2, "v={v} pos={pos} -> {w}");
            }
        }
    }

    #[test]
    fn boundary_candidates() {
        let g = pair_triple_gray();
        let (v0, v1) = g.candidates(&g.encode(0).unwrap()).unwrap();
        assert_eq!((v0, v1), (None, Some(0)));
        let (v0, v1) = g.candidates(&g.ccd().encode(3).unwrap()).unwrap();
        assert_eq!(v1, None);
        assert_eq!(v0, Some(53));
    }

    #[test]
    fn two_message_inner_code() {
        let g = GrayCode::new(Arc::new(RepetitionCode::new(3).unwrap())).unwrap();
        assert_eq!(g.max_value(), 12);
        for v in 0..12 {
            assert_eq!(g.decode(&g.encode(v).unwrap()).unwrap(), v);
            if v + 1 < 12 {
                let h = hamming(&g.encode(v).unwrap(), &g.encode(v + 1).unwrap()).unwrap();
                assert_eq!(h, 1);
            }
        }
    }
}
