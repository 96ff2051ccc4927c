use super::decoders::ML_MAX_MESSAGE_BITS;
use super::GeneratorMatrix;
use crate::bitcore::{hamming_unchecked, BitString};
use crate::error::{Error, Result};

/// `sum_{i=1..t} H(enc(i-1), enc(i))` in `O(n d)`.
///
/// Going from `i-1` to `i` flips the low `k` message bits, where `k - 1` is
/// the number of trailing zeros of `i`; the codeword then changes by the XOR
/// `v_k` of the first `k` rows. Exactly `floor(t / 2^k + 1/2)` of the steps
/// up to `t` flip `k` bits. Meaningful for `t < 2^n`.
pub fn count_codewords(t: u64, g: &GeneratorMatrix) -> u64 {
    let mut running = BitString::zeros(g.block_len());
    let mut total: u128 = 0;
    for (i, row) in g.rows().iter().enumerate() {
        let k = i as u32 + 1;
        running.xor_assign(row);
        let steps = if k >= 127 {
            0
        } else {
            (t as u128 + (1u128 << (k - 1))) >> k
        };
        total += running.weight() as u128 * steps;
    }
    total.min(u64::MAX as u128) as u64
}

/// The same sum by direct encoding of every message up to `t`.
pub fn count_codewords_brute_force(t: u64, g: &GeneratorMatrix) -> Result<u64> {
    let mut prev = g.encode_u64(0)?;
    let mut total = 0u64;
    for i in 1..=t {
        let next = g.encode_u64(i)?;
        total += hamming_unchecked(&prev, &next) as u64;
        prev = next;
    }
    Ok(total)
}

/// Minimum weight of a nonzero codeword.
pub fn exact_distance(g: &GeneratorMatrix) -> Result<usize> {
    let n = g.message_bits();
    if n > ML_MAX_MESSAGE_BITS {
        return Err(Error::BudgetExceeded(format!(
            "exact distance enumerates 2^n codewords; n = {n} exceeds {ML_MAX_MESSAGE_BITS}"
        )));
    }
    let mut word = BitString::zeros(g.block_len());
    let mut best = usize::MAX;
    for i in 1u64..(1 << n) {
        word.xor_assign(&g.rows()[i.trailing_zeros() as usize]);
        best = best.min(word.weight());
    }
    Ok(best)
}
