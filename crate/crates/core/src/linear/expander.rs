use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::decoders::{DecoderOptions, DecoderRegistry, FlipSchedule, ParityChecks};
use super::matrix::{null_space, rank};
use super::{GeneratorMatrix, LinearCodec};
use crate::bitcore::RandomSource;
use crate::codes::Codec;
use crate::error::{invalid, Error, Result};

/// Parameters of a random regular low-density parity-check code decoded by
/// bit flipping. The decoding radius `alpha` is a declared target, not a
/// certified expansion property.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExpanderConfig {
    pub block_len: usize,
    /// Checks per bit.
    pub var_degree: usize,
    /// Bits per check.
    pub check_degree: usize,
    pub alpha: f64,
    pub graph_seed: u64,
    pub max_retries: usize,
    /// Messages exposed through [`Codec`] are `0..2^message_bits`.
    pub message_bits: Option<usize>,
    pub max_iters: Option<usize>,
    pub schedule: FlipSchedule,
}

impl ExpanderConfig {
    pub fn new(
        block_len: usize,
        var_degree: usize,
        check_degree: usize,
        alpha: f64,
        graph_seed: u64,
    ) -> Self {
        ExpanderConfig {
            block_len,
            var_degree,
            check_degree,
            alpha,
            graph_seed,
            max_retries: 16,
            message_bits: None,
            max_iters: None,
            schedule: FlipSchedule::LowestIndex,
        }
    }

    pub fn check_count(&self) -> usize {
        self.block_len * self.var_degree / self.check_degree
    }

    /// Declared distance `floor(2 alpha d)`.
    pub fn declared_distance(&self) -> usize {
        ((2.0 * self.alpha * self.block_len as f64).floor() as usize).max(1)
    }

    fn validate(&self) -> Result<()> {
        if self.var_degree == 0 || self.check_degree < 2 {
            return Err(invalid(
                "degrees must satisfy var_degree >= 1, check_degree >= 2",
            ));
        }
        if self.check_degree > self.block_len {
            return Err(invalid("check degree exceeds block length"));
        }
        if (self.block_len * self.var_degree) % self.check_degree != 0 {
            return Err(invalid(format!(
                "d * var_degree = {} is not divisible by check_degree {}",
                self.block_len * self.var_degree,
                self.check_degree
            )));
        }
        if self.check_count() >= self.block_len {
            return Err(invalid("need fewer checks than bits for a nontrivial code"));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.25) {
            return Err(invalid(format!(
                "alpha {} must lie in (0, 1/4)",
                self.alpha
            )));
        }
        if self.alpha * (self.block_len as f64) < 1.0 {
            return Err(invalid("alpha * d must be at least 1"));
        }
        Ok(())
    }
}

/// A sampled code together with its sparse check structure.
#[derive(Clone, Debug)]
pub struct ExpanderCode {
    codec: LinearCodec,
    parity: Arc<ParityChecks>,
    attempts: usize,
}

impl ExpanderCode {
    pub fn codec(&self) -> &LinearCodec {
        &self.codec
    }

    pub fn into_codec(self) -> LinearCodec {
        self.codec
    }

    pub fn parity(&self) -> &Arc<ParityChecks> {
        &self.parity
    }

    /// Samples drawn before a full-rank check matrix was found.
    pub fn attempts(&self) -> usize {
        self.attempts
    }
}

/// Regular bipartite graph by socket matching; repeated bits inside a check,
/// then 4-cycles, are repaired by swapping sockets with other checks.
fn sample_checks(cfg: &ExpanderConfig, rng: &mut RandomSource) -> Option<Vec<Vec<u32>>> {
    let (dv, dc) = (cfg.var_degree, cfg.check_degree);
    let mut sockets: Vec<u32> = (0..cfg.block_len as u32)
        .flat_map(|b| std::iter::repeat_n(b, dv))
        .collect();
    sockets.shuffle(rng);
    let has_dup = |s: &[u32], check: usize| {
        let part = &s[check * dc..(check + 1) * dc];
        (1..dc).any(|i| part[..i].contains(&part[i]))
    };
    let clashes_with = |s: &[u32], check: usize, bit: u32, skip: usize| {
        (check * dc..(check + 1) * dc).any(|i| i != skip && s[i] == bit)
    };
    let checks = cfg.check_count();
    for _ in 0..50 * checks {
        let Some(bad) = (0..checks).find(|&c| has_dup(&sockets, c)) else {
            break;
        };
        let at = (bad * dc..(bad + 1) * dc)
            .find(|&i| (bad * dc..i).any(|j| sockets[j] == sockets[i]))
            .expect("duplicate present");
        let other = rng.random_range(0..sockets.len());
        let other_check = other / dc;
        if other_check == bad {
            continue;
        }
        let (a, b) = (sockets[at], sockets[other]);
        if clashes_with(&sockets, bad, b, at) || clashes_with(&sockets, other_check, a, other) {
            continue;
        }
        sockets.swap(at, other);
    }
    if (0..checks).any(|c| has_dup(&sockets, c)) {
        return None;
    }
    // break 4-cycles (two bits sharing two checks) the same way, a batch per
    // scan; give up silently when the degrees leave no room
    for _ in 0..64 {
        let bad = four_cycle_sockets(&sockets, cfg.block_len, dv, dc);
        if bad.is_empty() {
            break;
        }
        for at in bad {
            let other = rng.random_range(0..sockets.len());
            let (bad_check, other_check) = (at / dc, other / dc);
            let (a, b) = (sockets[at], sockets[other]);
            if other_check != bad_check
                && !clashes_with(&sockets, bad_check, b, at)
                && !clashes_with(&sockets, other_check, a, other)
            {
                sockets.swap(at, other);
            }
        }
    }
    Some(
        sockets
            .chunks(dc)
            .map(|c| {
                let mut c = c.to_vec();
                c.sort_unstable();
                c
            })
            .collect(),
    )
}

/// One socket per pair of bits that share two checks.
fn four_cycle_sockets(sockets: &[u32], bits: usize, dv: usize, dc: usize) -> Vec<usize> {
    let mut of_bit: Vec<Vec<usize>> = vec![Vec::with_capacity(dv); bits];
    for (i, &b) in sockets.iter().enumerate() {
        of_bit[b as usize].push(i);
    }
    let mut pairs = HashMap::new();
    let mut bad = Vec::new();
    for (b, socks) in of_bit.iter().enumerate() {
        let mut hit = false;
        for (x, &i) in socks.iter().enumerate() {
            for &j in &socks[x + 1..] {
                let key = ((i / dc).min(j / dc), (i / dc).max(j / dc));
                if let Some(&other) = pairs.get(&key) {
                    if other != b && !hit {
                        bad.push(i);
                        hit = true;
                    }
                }
                pairs.insert(key, b);
            }
        }
    }
    bad
}

/// Samples the check structure from `graph_seed`, derives a generator for
/// its null space and wires up the bit-flipping decoder. Rank-deficient
/// samples are redrawn from a derived seed up to `max_retries` times.
pub fn expander_build(cfg: &ExpanderConfig) -> Result<ExpanderCode> {
    cfg.validate()?;
    let root = RandomSource::new(cfg.graph_seed);
    for attempt in 0..cfg.max_retries.max(1) {
        let mut rng = root.split_indexed("expander-graph", attempt as u64);
        let Some(checks) = sample_checks(cfg, &mut rng) else {
            continue;
        };
        let parity = ParityChecks::new(cfg.block_len, checks)?;
        let rows = parity.as_rows();
        if rank(&rows) != rows.len() {
            continue;
        }
        let generator = GeneratorMatrix::new(null_space(&rows, cfg.block_len))?;
        let parity = Arc::new(parity);
        let opts = DecoderOptions {
            max_iters: cfg.max_iters,
            parity: Some(parity.clone()),
        };
        let decoder = DecoderRegistry::with_builtins().build(
            cfg.schedule.decoder_name(),
            &generator,
            &opts,
        )?;
        let bits = cfg.message_bits.unwrap_or(32).min(generator.message_bits());
        let mut codec = LinearCodec::with_decoder(generator, decoder, cfg.declared_distance())?
            .limit_message_bits(bits)?;
        codec.set_descriptor(descriptor(cfg, bits));
        debug_assert!(codec.encode(0).map(|c| c.weight() == 0).unwrap_or(false));
        return Ok(ExpanderCode {
            codec,
            parity,
            attempts: attempt + 1,
        });
    }
    Err(Error::InvalidParameter(format!(
        "no full-rank regular check matrix after {} samples",
        cfg.max_retries.max(1)
    )))
}

fn descriptor(cfg: &ExpanderConfig, bits: usize) -> String {
    let mut s = format!(
        "expander:d={},dv={},dc={},alpha={},seed={},msgbits={}",
        cfg.block_len, cfg.var_degree, cfg.check_degree, cfg.alpha, cfg.graph_seed, bits
    );
    if cfg.schedule != FlipSchedule::LowestIndex {
        s.push_str(&format!(",decoder={}", cfg.schedule.decoder_name()));
    }
    if let Some(it) = cfg.max_iters {
        s.push_str(&format!(",iters={it}"));
    }
    s
}
