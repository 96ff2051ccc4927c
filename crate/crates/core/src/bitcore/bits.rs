use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Fixed-length, immutable bit sequence.
///
/// Public indexing is 1-based: bit `1` is the leftmost character of the
/// text form and `len` the rightmost. Bits are packed into `u64` words with
/// the tail of the last word kept zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        BitString::zeros(len).complement()
    }

    /// Builds a string from a 0-based bit generator.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut out = BitString::zeros(len);
        for i in 0..len {
            if f(i) {
                out.set0(i, true);
            }
        }
        out
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        BitString::from_fn(bits.len(), |i| bits[i])
    }

    /// Low `len` bits of `value`, least significant bit first.
    pub fn from_u64_lsb_first(value: u64, len: usize) -> Self {
        BitString::from_fn(len, |i| i < 64 && (value >> i) & 1 == 1)
    }

    /// Inverse of [`BitString::from_u64_lsb_first`]; bits past 64 must be zero.
    pub fn to_u64_lsb_first(&self) -> Option<u64> {
        if self.words.iter().skip(1).any(|&w| w != 0) {
            return None;
        }
        Some(self.words.first().copied().unwrap_or(0))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at 1-based position `i`.
    pub fn bit(&self, i: usize) -> Result<bool> {
        self.check_index(i)?;
        Ok(self.get0(i - 1))
    }

    /// Copy with bit `i` (1-based) set to `value`.
    pub fn with_bit(&self, i: usize, value: bool) -> Result<BitString> {
        self.check_index(i)?;
        let mut out = self.clone();
        out.set0(i - 1, value);
        Ok(out)
    }

    /// Copy with bit `i` (1-based) inverted.
    pub fn flipped(&self, i: usize) -> Result<BitString> {
        self.check_index(i)?;
        let mut out = self.clone();
        out.flip0(i - 1);
        Ok(out)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = BitString::zeros(self.len + other.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        for i in other.one_indices0() {
            out.set0(self.len + i, true);
        }
        out
    }

    /// Concatenation of several parts in order.
    pub fn concat_all<'a>(parts: impl IntoIterator<Item = &'a BitString>) -> BitString {
        parts
            .into_iter()
            .fold(BitString::zeros(0), |acc, p| acc.concat(p))
    }

    pub fn complement(&self) -> BitString {
        let mut out = BitString {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        self.check_same_len(other)?;
        Ok(BitString {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    /// First `i` bits.
    pub fn prefix(&self, i: usize) -> Result<BitString> {
        if i > self.len {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len,
            });
        }
        Ok(self.slice0(0, i))
    }

    /// Last `i` bits.
    pub fn suffix(&self, i: usize) -> Result<BitString> {
        if i > self.len {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len,
            });
        }
        Ok(self.slice0(self.len - i, self.len))
    }

    /// Bits at 1-based positions `from..=to`.
    pub fn range(&self, from: usize, to: usize) -> Result<BitString> {
        if from == 0 || to > self.len || from > to + 1 {
            return Err(Error::IndexOutOfRange {
                index: if from == 0 { 0 } else { to },
                len: self.len,
            });
        }
        Ok(self.slice0(from - 1, to))
    }

    /// 1-based positions of set bits, ascending.
    pub fn one_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.one_indices0().map(|i| i + 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get0(i))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn from_words(len: usize, words: Vec<u64>) -> Result<BitString> {
        if words.len() != words_for(len) {
            return Err(Error::Parse(format!(
                "{} words cannot hold exactly {} bits",
                words.len(),
                len
            )));
        }
        let mut out = BitString { len, words };
        let before = out.words.last().copied();
        out.clear_tail();
        if out.words.last().copied() != before {
            return Err(Error::Parse("nonzero padding bits".into()));
        }
        Ok(out)
    }

    // 0-based internals used by the codecs.

    pub(crate) fn get0(&self, i: usize) -> bool {
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub(crate) fn set0(&mut self, i: usize, value: bool) {
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub(crate) fn flip0(&mut self, i: usize) {
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub(crate) fn xor_assign(&mut self, other: &BitString) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub(crate) fn one_indices0(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    pub(crate) fn slice0(&self, from: usize, to: usize) -> BitString {
        let len = to - from;
        let mut out = BitString::zeros(len);
        if from % WORD == 0 {
            let start = from / WORD;
            let n = out.words.len();
            out.words.copy_from_slice(&self.words[start..start + n]);
            out.clear_tail();
        } else {
            for i in 0..len {
                if self.get0(from + i) {
                    out.set0(i, true);
                }
            }
        }
        out
    }

    fn clear_tail(&mut self) {
        let used = self.len % WORD;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.len {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len,
            });
        }
        Ok(())
    }

    pub(crate) fn check_same_len(&self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                actual: other.len,
            });
        }
        Ok(())
    }

    pub(crate) fn expect_len(&self, expected: usize) -> Result<()> {
        if self.len != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: self.len,
            });
        }
        Ok(())
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming(a: &BitString, b: &BitString) -> Result<usize> {
    a.check_same_len(b)?;
    Ok(hamming_unchecked(a, b))
}

pub(crate) fn hamming_unchecked(a: &BitString, b: &BitString) -> usize {
    a.words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x ^ y).count_ones() as usize)
        .sum()
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut out = BitString::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => out.set0(i, true),
                other => {
                    return Err(Error::Parse(format!(
                        "unexpected character {other:?} in bit string"
                    )))
                }
            }
        }
        Ok(out)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&bs("000"), &bs("000")).unwrap(), 0);
        assert_eq!(hamming(&bs("000111"), &bs("111000")).unwrap(), 6);
        assert_eq!(hamming(&bs("10100"), &bs("11100")).unwrap(), 1);
    }

    #[test]
    fn hamming_rejects_length_mismatch() {
        assert_eq!(
            hamming(&bs("000"), &bs("0000")),
            Err(Error::LengthMismatch {
                expected: 3,
                actual: 4
            })
        );
    }

    #[test]
    fn prefix_suffix_xor_examples() {
        assert_eq!(bs("000111").prefix(0).unwrap(), BitString::zeros(0));
        assert_eq!(bs("000111").suffix(3).unwrap(), bs("111"));
        assert_eq!(bs("1010").xor(&bs("0110")).unwrap(), bs("1100"));
        assert!(bs("000111").prefix(7).is_err());
        assert!(bs("000111").suffix(7).is_err());
        assert!(bs("1010").xor(&bs("011")).is_err());
    }

    #[test]
    fn indexing_is_one_based() {
        let s = bs("1000");
        assert!(s.bit(1).unwrap());
        assert!(!s.bit(4).unwrap());
        assert!(s.bit(0).is_err());
        assert!(s.bit(5).is_err());
        assert_eq!(s.flipped(4).unwrap(), bs("1001"));
        assert_eq!(bs("0101").one_positions().collect::<Vec<_>>(), vec![2, 4]);
    }

    #[test]
    fn long_strings_cross_word_boundaries() {
        let a = BitString::from_fn(150, |i| i % 3 == 0);
        let b = a.suffix(89).unwrap();
        assert_eq!(a.prefix(61).unwrap().concat(&b), a);
        assert_eq!(a.complement().weight(), 150 - a.weight());
        assert_eq!(a.range(2, 150).unwrap(), a.suffix(149).unwrap());
    }

    #[test]
    fn text_form_rejects_garbage() {
        assert!("01x".parse::<BitString>().is_err());
        assert_eq!(bs("0110").to_string(), "0110");
    }

    #[test]
    fn word_form_rejects_dirty_padding() {
        assert!(BitString::from_words(3, vec![0b1000]).is_err());
        assert_eq!(BitString::from_words(3, vec![0b101]).unwrap(), bs("101"));
    }
}
