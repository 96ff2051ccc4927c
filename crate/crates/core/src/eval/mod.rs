//! Exact and sampled failure probabilities, the tail bounds they feed, and
//! the tail-concentration experiment for Gray codes.

mod catalogue;
mod tail;

pub use catalogue::{small_test_codes, TestCode};
pub use tail::{
    tail_experiment, ExperimentReport, TailConfig, TailRow, CSV_HEADER, REPORT_SCHEMA_VERSION,
};

use rand::Rng;

use crate::bitcore::{bsc_apply, hamming_unchecked, BitString, NoiseModel, RandomSource};
use crate::codes::Codec;
use crate::error::{invalid, Error, Result};

/// Largest block length for exhaustive error-pattern enumeration.
pub const EXACT_MAX_BLOCK_LEN: usize = 20;

/// Compensated (Kahan) sum, so exact results do not depend on how many
/// terms precede the small ones.
#[derive(Default)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Per message, the number of error patterns of each weight that decode
/// wrongly. Independent of `p`, so one enumeration serves every noise level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureProfile {
    block_len: usize,
    failures: Vec<Vec<u64>>,
}

impl FailureProfile {
    pub fn compute(code: &dyn Codec) -> Result<Self> {
        let params = code.params();
        let d = params.block_len;
        if d > EXACT_MAX_BLOCK_LEN {
            return Err(Error::BudgetExceeded(format!(
                "exact enumeration visits 2^d patterns per message; d = {d} exceeds {EXACT_MAX_BLOCK_LEN}"
            )));
        }
        if (params.messages as u128) << d > 1 << 32 {
            return Err(Error::BudgetExceeded(format!(
                "{} messages x 2^{d} patterns exceeds 2^32 decodes",
                params.messages
            )));
        }
        let mut failures = Vec::with_capacity(params.messages as usize);
        for v in 0..params.messages {
            let c = code.encode(v)?;
            let mut per_weight = vec![0u64; d + 1];
            let mut noisy = c.clone();
            // walk all patterns in reflected Gray order: one flip per step
            for i in 0u64..(1 << d) {
                if i > 0 {
                    noisy.flip0(i.trailing_zeros() as usize);
                }
                if code.decode(&noisy)? != v {
                    per_weight[hamming_unchecked(&noisy, &c)] += 1;
                }
            }
            failures.push(per_weight);
        }
        Ok(FailureProfile {
            block_len: d,
            failures,
        })
    }

    /// `Pr[decode(encode(v) + e) != v]` for every message `v`.
    pub fn per_message(&self, p: f64) -> Result<Vec<f64>> {
        NoiseModel::new(p)?;
        let d = self.block_len as i32;
        Ok(self
            .failures
            .iter()
            .map(|per_weight| {
                let mut acc = KahanSum::default();
                for (w, &n) in per_weight.iter().enumerate() {
                    if n > 0 {
                        acc.add(n as f64 * p.powi(w as i32) * (1.0 - p).powi(d - w as i32));
                    }
                }
                acc.sum
            })
            .collect())
    }

    /// Worst-case failure probability over messages.
    pub fn failure_prob(&self, p: f64) -> Result<f64> {
        Ok(self.per_message(p)?.into_iter().fold(0.0, f64::max))
    }

    pub fn failures(&self) -> &[Vec<u64>] {
        &self.failures
    }
}

/// `max_v Pr[decode(encode(v) + e_p) != v]` by enumerating all `2^d` error
/// patterns for every message. Terms are summed in increasing pattern weight.
pub fn exact_failure_prob(code: &dyn Codec, p: f64) -> Result<f64> {
    FailureProfile::compute(code)?.failure_prob(p)
}

/// A sampled probability with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl Estimate {
    pub fn from_counts(hits: u64, trials: u64) -> Self {
        let value = hits as f64 / trials as f64;
        Estimate {
            value,
            stderr: (value * (1.0 - value) / trials as f64).sqrt(),
            trials,
        }
    }

    /// `value <= bound + k * stderr`.
    pub fn within(&self, bound: f64, k: f64) -> bool {
        self.value <= bound + k * self.stderr
    }
}

/// Sampled worst-case failure probability.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct McFailure {
    /// The worst message's estimate.
    pub estimate: Estimate,
    pub worst_message: u64,
    /// Messages sampled.
    pub messages: Vec<u64>,
}

/// Messages probed when the code is too large to try all of them: multiples
/// of `step` with offsets `0, 1, step/2, step - 1`, plus the last message.
/// With more than `max_points` such messages, evenly spaced blocks are kept.
pub fn message_grid(messages: u64, step: u64, max_points: usize) -> Vec<u64> {
    let step = step.max(1);
    let blocks = messages.div_ceil(step);
    let keep = ((max_points.max(5) - 1) / 4) as u64;
    let bases: Vec<u64> = if blocks <= keep {
        (0..blocks).map(|j| j * step).collect()
    } else {
        (0..keep)
            .map(|j| (j as u128 * (blocks - 1) as u128 / (keep - 1).max(1) as u128) as u64 * step)
            .collect()
    };
    let mut grid = std::collections::BTreeSet::new();
    for base in bases {
        for off in [0, 1, step / 2, step - 1] {
            if let Some(v) = base.checked_add(off).filter(|&v| v < messages) {
                grid.insert(v);
            }
        }
    }
    grid.insert(messages - 1);
    grid.into_iter().collect()
}

/// Runs `trials` channel uses for each probed message and reports the worst.
/// All messages are probed when there are at most 64, otherwise the grid of
/// [`message_grid`] with step `block_len`.
pub fn mc_failure_prob(
    code: &dyn Codec,
    p: f64,
    trials: u64,
    rng: &RandomSource,
) -> Result<McFailure> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let noise = NoiseModel::new(p)?;
    let params = code.params();
    let messages = if params.messages <= 64 {
        (0..params.messages).collect()
    } else {
        message_grid(params.messages, params.block_len as u64, 64)
    };
    let mut worst: Option<(Estimate, u64)> = None;
    for &v in &messages {
        let c = code.encode(v)?;
        let mut stream = rng.split_indexed("mc-failure", v);
        let mut fails = 0u64;
        for _ in 0..trials {
            if code.decode(&bsc_apply(&c, noise, &mut stream))? != v {
                fails += 1;
            }
        }
        let est = Estimate::from_counts(fails, trials);
        if worst.is_none_or(|(w, _)| est.value > w.value) {
            worst = Some((est, v));
        }
    }
    let (estimate, worst_message) = worst.expect("at least two messages");
    Ok(McFailure {
        estimate,
        worst_message,
        messages,
    })
}

/// Minimum distance over all pairs of codewords.
pub fn exact_code_distance(code: &dyn Codec) -> Result<usize> {
    let m = code.params().messages;
    if m > 4096 {
        return Err(Error::BudgetExceeded(format!(
            "pairwise distance over {m} codewords exceeds 4096"
        )));
    }
    let words: Vec<BitString> = (0..m).map(|v| code.encode(v)).collect::<Result<_>>()?;
    let mut best = usize::MAX;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            best = best.min(hamming_unchecked(&words[i], &words[j]));
        }
    }
    Ok(best)
}

fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    let mut coeff = 1.0f64;
    for i in 0..k {
        coeff = coeff * (n - i) as f64 / (i + 1) as f64;
    }
    coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// `Pr[Bin(D, p) > D/2] + Pr[Bin(D, p) = D/2] / 2`: no decoder can fail less
/// often than this on the two codewords at distance `D`, since noise that
/// moves one of them closer to the other fools any decision rule on at
/// least one side.
pub fn distance_lower_bound(distance: usize, p: f64) -> Result<f64> {
    if distance == 0 {
        return Err(invalid("distance must be at least 1"));
    }
    NoiseModel::new(p)?;
    let mut acc = KahanSum::default();
    for k in (distance / 2 + 1)..=distance {
        acc.add(binomial_pmf(distance, k, p));
    }
    if distance % 2 == 0 {
        acc.add(binomial_pmf(distance, distance / 2, p) / 2.0);
    }
    Ok(acc.sum)
}

/// Inputs of the tail bound for a Gray code over an inner code with block
/// length `d`, distance `distance` and failure probability `inner_failure`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TailBoundParams {
    pub p: f64,
    pub d: usize,
    pub distance: usize,
    pub inner_failure: f64,
}

impl TailBoundParams {
    pub fn new(p: f64, d: usize, distance: usize, inner_failure: f64) -> Result<Self> {
        NoiseModel::new(p)?;
        if !(0.0..=1.0).contains(&inner_failure) {
            return Err(invalid(format!(
                "inner failure {inner_failure} is not a probability"
            )));
        }
        Ok(TailBoundParams {
            p,
            d,
            distance,
            inner_failure,
        })
    }

    /// `c = (1 - 2p)^2 / (4p + 2)`.
    pub fn c(&self) -> f64 {
        (1.0 - 2.0 * self.p).powi(2) / (4.0 * self.p + 2.0)
    }

    /// The part of the bound that does not shrink with `t`.
    pub fn floor_term(&self) -> f64 {
        12.0 * self.d as f64 * (-self.c() * self.distance as f64).exp() + 5.0 * self.inner_failure
    }

    /// `Pr[|v - v'| >= t] <= 2/(1 - e^-c) e^(-ct) + 12 d e^(-c D) + 5 P_p`.
    pub fn bound(&self, t: u64) -> f64 {
        let c = self.c();
        2.0 / (1.0 - (-c).exp()) * (-c * t as f64).exp() + self.floor_term()
    }
}

/// `exp(-(1 - 2p)^2 k / (4p + 2))`: bound on the chance that noise leaves a
/// codeword at least as close to another one at distance `k`.
pub fn confusion_bound(k: usize, p: f64) -> f64 {
    (-(1.0 - 2.0 * p).powi(2) * k as f64 / (4.0 * p + 2.0)).exp()
}

/// Exact value of the event in [`confusion_bound`]: at least half of the
/// `k` differing bits flip.
pub fn confusion_probability(k: usize, p: f64) -> Result<f64> {
    NoiseModel::new(p)?;
    let mut acc = KahanSum::default();
    for j in k.div_ceil(2)..=k {
        acc.add(binomial_pmf(k, j, p));
    }
    Ok(acc.sum)
}

/// Sampled version of [`confusion_probability`] on random words of length
/// `len` and a partner at distance `k`.
pub fn confusion_probability_mc(
    len: usize,
    k: usize,
    p: f64,
    trials: u64,
    rng: &RandomSource,
) -> Result<Estimate> {
    if k > len || trials == 0 {
        return Err(invalid("need k <= len and at least one trial"));
    }
    let noise = NoiseModel::new(p)?;
    let mut hits = 0;
    for i in 0..trials {
        let mut r = rng.split_indexed("confusion", i);
        let c1 = BitString::from_fn(len, |_| r.random::<bool>());
        let mut c2 = c1.clone();
        for pos in rand::seq::index::sample(&mut r, len, k) {
            c2.flip0(pos);
        }
        let noisy = bsc_apply(&c1, noise, &mut r);
        if hamming_unchecked(&noisy, &c2) <= hamming_unchecked(&noisy, &c1) {
            hits += 1;
        }
    }
    Ok(Estimate::from_counts(hits, trials))
}

/// `(1 - a)^2 / (2a + 2)`, the constant `c` at `p = a/2`.
pub fn expander_c(alpha: f64) -> f64 {
    (1.0 - alpha).powi(2) / (2.0 * alpha + 2.0)
}

/// `10 e^(-9t/40) + 12 d e^(-9 D / 40) + 5 e^(-a d / 6)` with `D = 2 a d`,
/// the tail bound at `p = a/2` once `c > 9/40` is used.
pub fn expander_corollary_bound(alpha: f64, d: usize, t: u64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.25) {
        return Err(invalid(format!("alpha {alpha} must lie in (0, 1/4)")));
    }
    let k = 9.0 / 40.0;
    let d = d as f64;
    Ok(10.0 * (-k * t as f64).exp()
        + 12.0 * d * (-k * 2.0 * alpha * d).exp()
        + 5.0 * (-alpha * d / 6.0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{BitRepetitionCode, RepetitionCode};

    #[test]
    fn exact_examples() {
        let rep3 = RepetitionCode::new(3).unwrap();
        assert!((exact_failure_prob(&rep3, 0.1).unwrap() - 0.028).abs() < 1e-12);
        assert_eq!(exact_failure_prob(&rep3, 0.0).unwrap(), 0.0);
        let pt = BitRepetitionCode::pair_triple();
        let want = 1.0 - (1.0f64 - 0.028).powi(2);
        assert!((exact_failure_prob(&pt, 0.1).unwrap() - want).abs() < 1e-12);
        assert!((want - 0.055216).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_examples() {
        assert!((distance_lower_bound(3, 0.1).unwrap() - 0.028).abs() < 1e-12);
        assert!((distance_lower_bound(2, 0.1).unwrap() - 0.10).abs() < 1e-12);
        assert_eq!(distance_lower_bound(5, 0.0).unwrap(), 0.0);
        assert!(distance_lower_bound(0, 0.1).is_err());
        assert!(distance_lower_bound(3, 0.5).is_err());
    }

    #[test]
    fn mc_matches_exact_rep3() {
        let rep3 = RepetitionCode::new(3).unwrap();
        let zero = mc_failure_prob(&rep3, 0.0, 1000, &RandomSource::new(1)).unwrap();
        assert_eq!(zero.estimate.value, 0.0);
        let est = mc_failure_prob(&rep3, 0.1, 100_000, &RandomSource::new(2)).unwrap();
        assert!((est.estimate.value - 0.028).abs() <= 3.0 * est.estimate.stderr);
    }

    #[test]
    fn tail_bound_constants() {
        let b = TailBoundParams::new(0.05, 6, 3, 0.0).unwrap();
        assert!((b.c() - 0.81 / 2.2).abs() < 1e-12);
        assert!((b.c() - 0.368182).abs() < 1e-6);
        assert!(b.bound(0) >= 2.0);
        for t in 0..20 {
            let head = |t: u64| b.bound(t) - b.floor_term();
            assert!(b.bound(t + 1) < b.bound(t));
            assert!((head(t + 1) - head(t) * (-b.c()).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn expander_constants() {
        for i in 1..250 {
            let a = i as f64 / 1000.0;
            assert!(expander_c(a) > 9.0 / 40.0);
            let c = expander_c(a);
            assert!(2.0 / (1.0 - (-c).exp()) < 10.0);
        }
        let v = expander_corollary_bound(0.2, 1000, 50).unwrap();
        assert!(v > 0.0 && v.is_finite());
        assert!(v >= 10.0 * (-9.0f64 * 50.0 / 40.0).exp());
        assert!(expander_corollary_bound(0.25, 1000, 1).is_err());
    }

    #[test]
    fn confusion_exact_is_below_bound() {
        for k in 1..40 {
            for p in [0.01, 0.05, 0.1, 0.2, 0.3] {
                assert!(confusion_probability(k, p).unwrap() <= confusion_bound(k, p));
            }
        }
    }

    #[test]
    fn grid_covers_offsets() {
        let g = message_grid(54, 18, 100);
        assert_eq!(g, vec![0, 1, 9, 17, 18, 19, 27, 35, 36, 37, 45, 53]);
        let big = message_grid(1 << 40, 18, 64);
        assert!(big.len() <= 64 && big.contains(&0) && big.contains(&((1 << 40) - 1)));
    }
}
