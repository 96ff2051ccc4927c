use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::matrix::{null_space, InfoSet};
use super::GeneratorMatrix;
use crate::bitcore::{hamming_unchecked, BitString};
use crate::error::{invalid, Error, Result};

/// Hard cap on message bits for exhaustive nearest-codeword search.
pub const ML_MAX_MESSAGE_BITS: usize = 16;
/// Hard cap on redundancy bits for the syndrome table.
pub const SYNDROME_MAX_REDUNDANCY: usize = 20;

/// Output of a hard-decision decoder.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodedWord {
    pub message: BitString,
    pub codeword: BitString,
    /// False when an iterative decoder stopped on a non-codeword.
    pub converged: bool,
    pub iterations: usize,
}

/// A decoding strategy for one fixed linear code.
pub trait LinearDecoder: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn decode_word(&self, c: &BitString) -> Result<DecodedWord>;
}

/// Exhaustive nearest codeword; the smallest message wins ties.
#[derive(Debug)]
pub struct MlDecoder {
    g: GeneratorMatrix,
}

impl MlDecoder {
    pub fn new(g: &GeneratorMatrix) -> Result<Self> {
        if g.message_bits() > ML_MAX_MESSAGE_BITS {
            return Err(Error::BudgetExceeded(format!(
                "exhaustive decoding needs n <= {ML_MAX_MESSAGE_BITS}, got n = {}; \
                 select decoder=syndrome or decoder=bitflip",
                g.message_bits()
            )));
        }
        Ok(MlDecoder { g: g.clone() })
    }

    pub fn nearest(&self, c: &BitString) -> Result<u64> {
        c.expect_len(self.g.block_len())?;
        let rows = self.g.rows();
        let mut word = BitString::zeros(self.g.block_len());
        let mut best = (hamming_unchecked(&word, c), 0u64);
        // walk all messages in reflected binary order, one row XOR per step
        for i in 1u64..(1 << rows.len()) {
            word.xor_assign(&rows[i.trailing_zeros() as usize]);
            let v = i ^ (i >> 1);
            let dist = hamming_unchecked(&word, c);
            if (dist, v) < best {
                best = (dist, v);
            }
        }
        Ok(best.1)
    }
}

impl LinearDecoder for MlDecoder {
    fn name(&self) -> &'static str {
        "ml"
    }

    fn decode_word(&self, c: &BitString) -> Result<DecodedWord> {
        let v = self.nearest(c)?;
        Ok(DecodedWord {
            message: BitString::from_u64_lsb_first(v, self.g.message_bits()),
            codeword: self.g.encode_u64(v)?,
            converged: true,
            iterations: 0,
        })
    }
}

/// Minimum-weight coset leader per syndrome.
#[derive(Debug)]
pub struct SyndromeDecoder {
    block_len: usize,
    column_syndromes: Vec<u32>,
    leaders: Vec<u64>,
    info: InfoSet,
}

impl SyndromeDecoder {
    pub fn new(g: &GeneratorMatrix) -> Result<Self> {
        let d = g.block_len();
        let r = d - g.message_bits();
        if r > SYNDROME_MAX_REDUNDANCY || d > 63 {
            return Err(Error::BudgetExceeded(format!(
                "syndrome table needs d - n <= {SYNDROME_MAX_REDUNDANCY} and d <= 63, got d = {d}, n = {}",
                g.message_bits()
            )));
        }
        let checks = null_space(g.rows(), d);
        let column_syndromes: Vec<u32> = (0..d)
            .map(|j| {
                checks
                    .iter()
                    .enumerate()
                    .fold(0u32, |s, (k, h)| s | (u32::from(h.get0(j)) << k))
            })
            .collect();
        let syndrome_of = |mask: u64| {
            let mut s = 0u32;
            let mut rest = mask;
            while rest != 0 {
                s ^= column_syndromes[rest.trailing_zeros() as usize];
                rest &= rest - 1;
            }
            s
        };
        let size = 1usize << r;
        let mut table: Vec<Option<u64>> = vec![None; size];
        let mut filled = 0usize;
        'weights: for w in 0..=d {
            // all d-bit masks of weight w, ascending (Gosper's hack)
            let mut mask: u64 = if w == 0 { 0 } else { (1u64 << w) - 1 };
            loop {
                let s = syndrome_of(mask) as usize;
                if table[s].is_none() {
                    table[s] = Some(mask);
                    filled += 1;
                    if filled == size {
                        break 'weights;
                    }
                }
                if w == 0 {
                    break;
                }
                let low = mask & mask.wrapping_neg();
                let ripple = mask + low;
                mask = (((ripple ^ mask) >> 2) / low) | ripple;
                if mask >> d != 0 {
                    break;
                }
            }
        }
        let leaders = table
            .into_iter()
            .map(|l| l.expect("every syndrome has a leader"))
            .collect();
        Ok(SyndromeDecoder {
            block_len: d,
            column_syndromes,
            leaders,
            info: InfoSet::new(g),
        })
    }
}

impl LinearDecoder for SyndromeDecoder {
    fn name(&self) -> &'static str {
        "syndrome"
    }

    fn decode_word(&self, c: &BitString) -> Result<DecodedWord> {
        c.expect_len(self.block_len)?;
        let s = c
            .one_indices0()
            .fold(0u32, |s, j| s ^ self.column_syndromes[j]);
        let leader = self.leaders[s as usize];
        let mut codeword = c.clone();
        codeword.xor_assign(&BitString::from_u64_lsb_first(leader, self.block_len));
        Ok(DecodedWord {
            message: self.info.message_of(&codeword),
            codeword,
            converged: true,
            iterations: 0,
        })
    }
}

/// Sparse parity-check structure: which bits each check covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityChecks {
    block_len: usize,
    checks: Vec<Vec<u32>>,
    bit_checks: Vec<Vec<u32>>,
}

impl ParityChecks {
    pub fn new(block_len: usize, checks: Vec<Vec<u32>>) -> Result<Self> {
        let mut bit_checks = vec![Vec::new(); block_len];
        for (ci, check) in checks.iter().enumerate() {
            for &b in check {
                let slot = bit_checks.get_mut(b as usize).ok_or_else(|| {
                    invalid(format!("check {ci} references bit {b} >= {block_len}"))
                })?;
                slot.push(ci as u32);
            }
        }
        Ok(ParityChecks {
            block_len,
            checks,
            bit_checks,
        })
    }

    /// Dense checks spanning the dual of `g`.
    pub fn dual_of(g: &GeneratorMatrix) -> Result<Self> {
        let d = g.block_len();
        let checks = null_space(g.rows(), d)
            .iter()
            .map(|h| h.one_indices0().map(|i| i as u32).collect())
            .collect();
        ParityChecks::new(d, checks)
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn checks(&self) -> &[Vec<u32>] {
        &self.checks
    }

    pub fn as_rows(&self) -> Vec<BitString> {
        self.checks
            .iter()
            .map(|c| {
                let mut row = BitString::zeros(self.block_len);
                for &b in c {
                    row.flip0(b as usize);
                }
                row
            })
            .collect()
    }

    /// Same text layout as generator files: `"r d"` then `r` rows.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.checks.len(), self.block_len);
        for row in self.as_rows() {
            s.push_str(&row.to_string());
            s.push('\n');
        }
        s
    }

    pub fn unsatisfied(&self, c: &BitString) -> usize {
        self.checks
            .iter()
            .filter(|check| check.iter().filter(|&&b| c.get0(b as usize)).count() % 2 == 1)
            .count()
    }
}

/// Which improving bit to flip next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlipSchedule {
    /// The lowest-index bit whose flip lowers the unsatisfied count.
    #[default]
    LowestIndex,
    /// The bit lowering it the most, lowest index among equals.
    GreatestGain,
}

impl FlipSchedule {
    pub fn decoder_name(self) -> &'static str {
        match self {
            FlipSchedule::LowestIndex => "bitflip",
            FlipSchedule::GreatestGain => "bitflip-greedy",
        }
    }
}

/// Bit flipping: while some bit's flip strictly lowers the number of
/// unsatisfied checks, flip one chosen by the schedule.
#[derive(Debug)]
pub struct BitFlipDecoder {
    parity: Arc<ParityChecks>,
    info: InfoSet,
    max_iters: usize,
    schedule: FlipSchedule,
}

impl BitFlipDecoder {
    pub fn new(g: &GeneratorMatrix, parity: Arc<ParityChecks>, max_iters: usize) -> Result<Self> {
        Self::with_schedule(g, parity, max_iters, FlipSchedule::LowestIndex)
    }

    pub fn with_schedule(
        g: &GeneratorMatrix,
        parity: Arc<ParityChecks>,
        max_iters: usize,
        schedule: FlipSchedule,
    ) -> Result<Self> {
        if parity.block_len() != g.block_len() {
            return Err(Error::LengthMismatch {
                expected: g.block_len(),
                actual: parity.block_len(),
            });
        }
        Ok(BitFlipDecoder {
            parity,
            info: InfoSet::new(g),
            max_iters,
            schedule,
        })
    }

    pub fn parity(&self) -> &ParityChecks {
        &self.parity
    }

    /// Runs the flipping loop and returns the final word, whether every check
    /// is satisfied, and the number of flips made.
    pub fn flip(&self, c: &BitString) -> Result<(BitString, bool, usize)> {
        let p = &*self.parity;
        c.expect_len(p.block_len)?;
        let mut word = c.clone();
        let mut failing: Vec<bool> = p
            .checks
            .iter()
            .map(|check| check.iter().filter(|&&b| word.get0(b as usize)).count() % 2 == 1)
            .collect();
        let mut unsat: Vec<u32> = p
            .bit_checks
            .iter()
            .map(|cs| cs.iter().filter(|&&ci| failing[ci as usize]).count() as u32)
            .collect();
        // flip gain of bit b is (unsatisfied - satisfied) among its checks
        let gain = |b: usize, unsat: &[u32]| 2 * unsat[b] as i64 - p.bit_checks[b].len() as i64;
        let key = |g: i64, b: usize| match self.schedule {
            FlipSchedule::LowestIndex => (Reverse(0), b as u32),
            FlipSchedule::GreatestGain => (Reverse(g), b as u32),
        };
        let mut candidates: BTreeSet<(Reverse<i64>, u32)> = (0..p.block_len)
            .map(|b| (gain(b, &unsat), b))
            .filter(|&(g, _)| g > 0)
            .map(|(g, b)| key(g, b))
            .collect();
        let mut iterations = 0;
        while iterations < self.max_iters {
            let Some((_, b)) = candidates.pop_first() else {
                break;
            };
            iterations += 1;
            word.flip0(b as usize);
            for &ci in &p.bit_checks[b as usize] {
                let now_failing = !failing[ci as usize];
                failing[ci as usize] = now_failing;
                for &nb in &p.checks[ci as usize] {
                    let nb = nb as usize;
                    let before = gain(nb, &unsat);
                    if now_failing {
                        unsat[nb] += 1;
                    } else {
                        unsat[nb] -= 1;
                    }
                    let after = gain(nb, &unsat);
                    if before > 0 {
                        candidates.remove(&key(before, nb));
                    }
                    if after > 0 {
                        candidates.insert(key(after, nb));
                    }
                }
            }
        }
        let converged = !failing.iter().any(|&f| f);
        Ok((word, converged, iterations))
    }
}

impl LinearDecoder for BitFlipDecoder {
    fn name(&self) -> &'static str {
        self.schedule.decoder_name()
    }

    fn decode_word(&self, c: &BitString) -> Result<DecodedWord> {
        let (codeword, converged, iterations) = self.flip(c)?;
        Ok(DecodedWord {
            message: self.info.message_of(&codeword),
            codeword,
            converged,
            iterations,
        })
    }
}

/// Options a decoder factory may consult.
#[derive(Clone, Debug, Default)]
pub struct DecoderOptions {
    pub max_iters: Option<usize>,
    pub parity: Option<Arc<ParityChecks>>,
}

pub type DecoderFactory = fn(&GeneratorMatrix, &DecoderOptions) -> Result<Arc<dyn LinearDecoder>>;

fn bit_flip(
    g: &GeneratorMatrix,
    opts: &DecoderOptions,
    schedule: FlipSchedule,
) -> Result<Arc<dyn LinearDecoder>> {
    let parity = match &opts.parity {
        Some(p) => p.clone(),
        None => Arc::new(ParityChecks::dual_of(g)?),
    };
    let iters = opts.max_iters.unwrap_or(10 * g.block_len());
    Ok(Arc::new(BitFlipDecoder::with_schedule(
        g, parity, iters, schedule,
    )?))
}

/// Decoder strategies by name.
#[derive(Clone)]
pub struct DecoderRegistry {
    factories: BTreeMap<&'static str, DecoderFactory>,
}

impl DecoderRegistry {
    pub fn empty() -> Self {
        DecoderRegistry {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = DecoderRegistry::empty();
        r.register("ml", |g, _| Ok(Arc::new(MlDecoder::new(g)?)));
        r.register("syndrome", |g, _| Ok(Arc::new(SyndromeDecoder::new(g)?)));
        r.register("bitflip", |g, opts| {
            bit_flip(g, opts, FlipSchedule::LowestIndex)
        });
        r.register("bitflip-greedy", |g, opts| {
            bit_flip(g, opts, FlipSchedule::GreatestGain)
        });
        r
    }

    pub fn register(&mut self, name: &'static str, factory: DecoderFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn build(
        &self,
        name: &str,
        g: &GeneratorMatrix,
        opts: &DecoderOptions,
    ) -> Result<Arc<dyn LinearDecoder>> {
        let factory = self.factories.get(name).ok_or_else(|| {
            invalid(format!(
                "unknown decoder `{name}` (known: {})",
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        factory(g, opts)
    }
}

impl fmt::Debug for DecoderRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.names()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::hamming;

    fn g(rows: &[&str]) -> GeneratorMatrix {
        GeneratorMatrix::from_rows_text(rows).unwrap()
    }

    fn hamming74() -> GeneratorMatrix {
        g(&["1000110", "0100101", "0010011", "0001111"])
    }

    /// Independent oracle: nearest codeword by direct enumeration in
    /// natural message order.
    fn oracle(m: &GeneratorMatrix, c: &BitString) -> u64 {
        (0..1u64 << m.message_bits())
            .min_by_key(|&v| (hamming(&m.encode_u64(v).unwrap(), c).unwrap(), v))
            .unwrap()
    }

    #[test]
    fn ml_examples() {
        let m = g(&["101", "011"]);
        let dec = MlDecoder::new(&m).unwrap();
        assert_eq!(dec.nearest(&"101".parse().unwrap()).unwrap(), 1);
        assert_eq!(dec.nearest(&"100".parse().unwrap()).unwrap(), 0);
        // distances to 000, 101, 011, 110 are 3, 1, 1, 1
        assert_eq!(oracle(&m, &"111".parse().unwrap()), 1);
        assert_eq!(dec.nearest(&"111".parse().unwrap()).unwrap(), 1);
    }

    #[test]
    fn ml_matches_oracle_on_every_word() {
        let m = hamming74();
        let dec = MlDecoder::new(&m).unwrap();
        for w in 0..128u64 {
            let c = BitString::from_u64_lsb_first(w, 7);
            assert_eq!(dec.nearest(&c).unwrap(), oracle(&m, &c));
        }
    }

    #[test]
    fn ml_budget() {
        let rows: Vec<BitString> = (0..17)
            .map(|i| BitString::from_fn(17, |j| i == j))
            .collect();
        let big = GeneratorMatrix::new(rows).unwrap();
        assert!(matches!(
            MlDecoder::new(&big),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn syndrome_decoder_reaches_ml_distance() {
        let m = hamming74();
        let syn = SyndromeDecoder::new(&m).unwrap();
        let ml = MlDecoder::new(&m).unwrap();
        for w in 0..128u64 {
            let c = BitString::from_u64_lsb_first(w, 7);
            let out = syn.decode_word(&c).unwrap();
            let best = ml.decode_word(&c).unwrap();
            assert_eq!(
                hamming(&out.codeword, &c).unwrap(),
                hamming(&best.codeword, &c).unwrap()
            );
            assert_eq!(m.encode_bits(&out.message).unwrap(), out.codeword);
        }
    }

    #[test]
    fn bitflip_fixed_point_and_single_error() {
        let m = hamming74();
        let dec = DecoderRegistry::with_builtins()
            .build("bitflip", &m, &DecoderOptions::default())
            .unwrap();
        let cw = m.encode_u64(11).unwrap();
        let clean = dec.decode_word(&cw).unwrap();
        assert!(clean.converged);
        assert_eq!(clean.iterations, 0);
        assert_eq!(clean.message.to_u64_lsb_first(), Some(11));
    }

    #[test]
    fn bitflip_gives_up_gracefully() {
        let m = hamming74();
        let parity = Arc::new(ParityChecks::dual_of(&m).unwrap());
        let dec = BitFlipDecoder::new(&m, parity, 3).unwrap();
        let out = dec.decode_word(&"1010101".parse().unwrap()).unwrap();
        assert!(out.iterations <= 3);
        assert_eq!(out.message.len(), 4);
    }

    #[test]
    fn registry_rejects_unknown() {
        let err = DecoderRegistry::with_builtins()
            .build("viterbi", &hamming74(), &DecoderOptions::default())
            .unwrap_err();
        assert!(err.to_string().contains("viterbi"));
    }
}
