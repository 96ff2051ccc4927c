use super::{Codec, CodecParams, TieBreakPolicy};
use crate::bitcore::BitString;
use crate::error::{Error, Result};

/// `1^v 0^(m-v)`.
pub fn unary_encode(v: u64, m: usize) -> Result<BitString> {
    if v > m as u64 {
        return Err(Error::ValueOutOfRange {
            value: v,
            limit: m as u64 + 1,
        });
    }
    let v = v as usize;
    Ok(BitString::from_fn(m, |i| i < v))
}

/// Nearest unary codeword to `c`, in one left-to-right pass.
///
/// The distance to `1^r 0^(len-r)` changes by `+1` when bit `r` is a zero
/// and by `-1` when it is a one, so a running sum finds every minimiser.
pub fn unary_decode(c: &BitString, ties: &mut TieBreakPolicy) -> u64 {
    let mut cost = c.weight() as i64;
    let mut best = cost;
    let mut best_count = 1usize;
    let mut chosen = 0u64;
    let randomized = matches!(ties, TieBreakPolicy::Random(_));
    for r in 1..=c.len() {
        cost += if c.get0(r - 1) { -1 } else { 1 };
        if cost < best {
            best = cost;
            best_count = 1;
            chosen = r as u64;
        } else if cost == best && randomized {
            // reservoir sampling over the tied minimisers
            best_count += 1;
            if ties.pick(best_count) == 0 {
                chosen = r as u64;
            }
        }
    }
    chosen
}

/// Unary code of length `len` over the `len + 1` messages `0..=len`.
#[derive(Clone, Debug)]
pub struct UnaryCode {
    len: usize,
}

impl UnaryCode {
    pub fn new(len: usize) -> Result<Self> {
        CodecParams::new(len as u64 + 1, len, 1)?;
        Ok(UnaryCode { len })
    }
}

impl Codec for UnaryCode {
    fn params(&self) -> CodecParams {
        CodecParams {
            messages: self.len as u64 + 1,
            block_len: self.len,
            distance: 1,
        }
    }

    fn encode(&self, v: u64) -> Result<BitString> {
        unary_encode(v, self.len)
    }

    fn decode(&self, c: &BitString) -> Result<u64> {
        c.expect_len(self.len)?;
        Ok(unary_decode(c, &mut TieBreakPolicy::Smallest))
    }

    fn descriptor(&self) -> String {
        format!("unary:m={}", self.len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::{hamming, RandomSource};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn brute_force_argmin(c: &BitString) -> u64 {
        (0..=c.len() as u64)
            .min_by_key(|&r| (hamming(&unary_encode(r, c.len()).unwrap(), c).unwrap(), r))
            .unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(unary_encode(3, 5).unwrap(), bs("11100"));
        assert_eq!(unary_encode(0, 4).unwrap(), bs("0000"));
        assert_eq!(unary_encode(4, 4).unwrap(), bs("1111"));
        assert!(unary_encode(5, 4).is_err());
    }

    #[test]
    fn decode_examples() {
        let mut ties = TieBreakPolicy::Smallest;
        assert_eq!(unary_decode(&bs("11100"), &mut ties), 3);
        assert_eq!(unary_decode(&bs("10100"), &mut ties), 1);
        assert_eq!(unary_decode(&bs("01111"), &mut ties), 5);
        assert_eq!(unary_decode(&BitString::zeros(0), &mut ties), 0);
    }

    #[test]
    fn scan_matches_exhaustive_argmin() {
        for len in 0..=10usize {
            for word in 0u64..(1 << len) {
                let c = BitString::from_u64_lsb_first(word, len);
                assert_eq!(
                    unary_decode(&c, &mut TieBreakPolicy::Smallest),
                    brute_force_argmin(&c),
                    "{c}"
                );
            }
        }
    }

    #[test]
    fn random_ties_stay_among_minimisers() {
        let c = bs("10100");
        let mut ties = TieBreakPolicy::Random(RandomSource::new(4));
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..200 {
            seen.insert(unary_decode(&c, &mut ties));
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![1, 3]);
    }
}
