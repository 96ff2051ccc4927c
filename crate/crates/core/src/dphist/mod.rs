//! A differentially private histogram sketch. Small counts are scaled,
//! stochastically rounded and written as sensitivity-1 Gray codewords whose
//! bits are scattered over a bit table by one hash function per codeword
//! position; the table is then released through randomized response. Counts
//! above a threshold are released exactly plus discrete Laplace noise.

mod format;
mod noise;

pub use noise::{discrete_laplace, discrete_laplace_zero_mass};

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::bitcore::{hamming_unchecked, BitString, RandomSource};
use crate::codes::SharedCodec;
use crate::error::{invalid, Error, Result};
use crate::registry::CodecRegistry;

/// Gray code over the two-bit, three-fold repetition code written as a
/// linear code: 30 bits, 54 values.
pub const DEFAULT_INNER: &str = "gray:inner=(linear:rows=000111/111000,decoder=ml)";

/// Largest randomized-response flip probability, and largest `n/s`.
pub const MAX_BIT_CORRUPTION: f64 = 1.0 / 20.0;

/// Sketch parameters. Built by [`HistParams::new`] and checked by
/// [`HistParams::validate`].
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HistParams {
    /// Elements are `0..universe`.
    pub universe: u64,
    /// Bound on the dataset size.
    pub n: u64,
    pub eps: f64,
    /// Largest stored small count `ell = ceil(log2 u)`.
    pub ell: u64,
    /// Table rows.
    pub s: u64,
    /// Randomized-response flip probability.
    pub q: f64,
    /// Count scaling before rounding.
    pub gamma: f64,
    /// Counts whose noisy value reaches this go to the heavy store.
    pub threshold: f64,
    pub laplace_scale: f64,
    /// Gray code descriptor.
    pub inner: String,
    /// `h_b(i) = i` for every column; needs `s >= universe`.
    pub injective_hash: bool,
    /// Permits `q = 0`. The output is then not private.
    pub non_private_debug: bool,
}

impl HistParams {
    /// `q = 1/20`, `s = 20 n`, `ell = ceil(log2 u)`, the largest
    /// `gamma <= 1` with `gamma ln((1-q)/q) <= eps`, `T = ell / gamma` and
    /// Laplace scale `1/eps`.
    pub fn new(universe: u64, n: u64, eps: f64) -> Result<Self> {
        if universe < 2 || n == 0 {
            return Err(invalid("need universe >= 2 and n >= 1"));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid(format!("eps must be positive, got {eps}")));
        }
        let q = MAX_BIT_CORRUPTION;
        let ell = 64 - (universe - 1).leading_zeros() as u64;
        let gamma = (eps / ((1.0 - q) / q).ln()).min(1.0);
        let p = HistParams {
            universe,
            n,
            eps,
            ell,
            s: n.checked_mul(20).ok_or_else(|| invalid("20 n overflows"))?,
            q,
            gamma,
            threshold: ell as f64 / gamma,
            laplace_scale: 1.0 / eps,
            inner: DEFAULT_INNER.to_string(),
            injective_hash: false,
            non_private_debug: false,
        };
        Ok(p)
    }

    /// No randomized response and `h_b(i) = i`: estimates equal the rounded
    /// counts. Not private.
    pub fn debug_exact(universe: u64, n: u64, eps: f64) -> Result<Self> {
        let mut p = Self::new(universe, n, eps)?;
        p.q = 0.0;
        p.s = universe;
        p.injective_hash = true;
        p.non_private_debug = true;
        Ok(p)
    }

    /// Privacy loss of the sketch, `gamma ln((1-q)/q)`.
    pub fn sketch_epsilon(&self) -> f64 {
        if self.q == 0.0 {
            f64::INFINITY
        } else {
            self.gamma * ((1.0 - self.q) / self.q).ln()
        }
    }

    /// Names the first violated condition.
    pub fn validate(&self) -> Result<SharedCodec> {
        let fail = |m: String| Err(Error::InvalidParameter(m));
        if !(self.eps > 0.0) {
            return fail(format!("eps > 0 violated: eps = {}", self.eps));
        }
        if self.ell == 0 || self.universe < 2 {
            return fail("ell >= 1 and universe >= 2 required".into());
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return fail(format!("0 < gamma <= 1 violated: gamma = {}", self.gamma));
        }
        if !(self.q >= 0.0 && self.q <= MAX_BIT_CORRUPTION) {
            return fail(format!("q <= 1/20 violated: q = {}", self.q));
        }
        if self.q == 0.0 && !self.non_private_debug {
            return fail("q > 0 violated: q = 0 needs the non-private debug mode".into());
        }
        if self.q > 0.0 && self.sketch_epsilon() > self.eps * (1.0 + 1e-12) {
            return fail(format!(
                "gamma * ln((1-q)/q) <= eps violated: {} * ln({}) = {} > {}",
                self.gamma,
                (1.0 - self.q) / self.q,
                self.sketch_epsilon(),
                self.eps
            ));
        }
        if self.s == 0 {
            return fail("s >= 1 violated".into());
        }
        if self.injective_hash {
            if self.s < self.universe {
                return fail(format!(
                    "s >= universe violated for injective hashing: {} < {}",
                    self.s, self.universe
                ));
            }
        } else if self.n as f64 / self.s as f64 > MAX_BIT_CORRUPTION {
            return fail(format!(
                "n/s <= 1/20 violated: {}/{} = {}",
                self.n,
                self.s,
                self.n as f64 / self.s as f64
            ));
        }
        if !(self.laplace_scale > 0.0) {
            return fail(format!(
                "laplace scale > 0 violated: {}",
                self.laplace_scale
            ));
        }
        let codec = CodecRegistry::with_builtins().build(&self.inner)?;
        if !codec.zero_maps_to_zero() {
            return fail(format!("encode(0) = 0 violated by `{}`", self.inner));
        }
        if codec.params().messages <= self.ell {
            return fail(format!(
                "inner message range > ell violated: {} <= {}",
                codec.params().messages,
                self.ell
            ));
        }
        Ok(codec)
    }

    /// Upper bound on the chance that a single read bit is wrong,
    /// `q + n/s`.
    pub fn bit_corruption_bound(&self) -> f64 {
        let collisions = if self.injective_hash {
            0.0
        } else {
            self.n as f64 / self.s as f64
        };
        self.q + collisions
    }
}

/// A multiset over the universe, by element count.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dataset {
    counts: BTreeMap<u64, u64>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_elements(items: impl IntoIterator<Item = u64>) -> Self {
        let mut d = Dataset::new();
        for i in items {
            d.add(i, 1);
        }
        d
    }

    pub fn from_counts(items: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut d = Dataset::new();
        for (i, c) in items {
            d.add(i, c);
        }
        d
    }

    pub fn add(&mut self, element: u64, count: u64) {
        if count > 0 {
            *self.counts.entry(element).or_insert(0) += count;
        }
    }

    /// Removes one occurrence; false if the element is absent.
    pub fn remove_one(&mut self, element: u64) -> bool {
        match self.counts.get_mut(&element) {
            Some(c) if *c > 1 => {
                *c -= 1;
                true
            }
            Some(_) => {
                self.counts.remove(&element);
                true
            }
            None => false,
        }
    }

    pub fn count(&self, element: u64) -> u64 {
        self.counts.get(&element).copied().unwrap_or(0)
    }

    /// Total number of occurrences.
    pub fn size(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    /// `element,count` lines; blank lines, `#` comments and a header line
    /// starting with a letter are skipped.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut d = Dataset::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() || line.starts_with(|c: char| c.is_ascii_alphabetic()) {
                continue;
            }
            let (e, c) = line.split_once(',').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `element,count`", lineno + 1))
            })?;
            let num = |s: &str| {
                s.trim().parse::<u64>().map_err(|_| {
                    Error::Parse(format!(
                        "line {}: `{}` is not a count",
                        lineno + 1,
                        s.trim()
                    ))
                })
            };
            d.add(num(e)?, num(c)?);
        }
        Ok(d)
    }
}

/// `h(x) = floor(s * ((a x + b) mod 2^64) / 2^64)` with odd `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MultiplyShift {
    pub a: u64,
    pub b: u64,
}

impl MultiplyShift {
    pub fn sample(rng: &mut RandomSource) -> Self {
        MultiplyShift {
            a: rng.random::<u64>() | 1,
            b: rng.random(),
        }
    }

    pub fn hash(&self, x: u64, s: u64) -> u64 {
        let mixed = self.a.wrapping_mul(x).wrapping_add(self.b);
        ((mixed as u128 * s as u128) >> 64) as u64
    }
}

/// The per-column hash functions; public metadata of the release.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct HashSeeds {
    pub columns: Vec<MultiplyShift>,
    pub injective: bool,
}

impl HashSeeds {
    pub fn sample(dprime: usize, injective: bool, rng: &RandomSource) -> Self {
        let mut r = rng.split("hash");
        HashSeeds {
            columns: (0..dprime).map(|_| MultiplyShift::sample(&mut r)).collect(),
            injective,
        }
    }

    pub fn row(&self, column: usize, element: u64, s: u64) -> u64 {
        if self.injective {
            element
        } else {
            self.columns[column].hash(element, s)
        }
    }
}

/// Stochastic rounding draws `U_i`, one per element, fixed by a seed so that
/// neighbouring datasets can share them.
#[derive(Clone, Debug)]
pub struct Rounding {
    source: RandomSource,
}

impl Rounding {
    pub fn new(seed: u64) -> Self {
        Rounding {
            source: RandomSource::new(seed),
        }
    }

    pub fn uniform(&self, element: u64) -> f64 {
        self.source.split_indexed("round", element).random()
    }

    /// `min(ell, floor(gamma min(x, T) + U_i))`.
    pub fn scaled(&self, params: &HistParams, element: u64, count: u64) -> u64 {
        let x = (count as f64).min(params.threshold);
        ((params.gamma * x + self.uniform(element)).floor() as u64).min(params.ell)
    }
}

/// The pre-noise bit table, stored column by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub columns: Vec<BitString>,
}

impl Projection {
    pub fn bit(&self, row: u64, column: usize) -> bool {
        self.columns[column].get0(row as usize)
    }

    /// Number of differing bits across the whole table.
    pub fn distance(&self, other: &Projection) -> usize {
        self.columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| hamming_unchecked(a, b))
            .sum()
    }
}

fn check_elements(data: &Dataset, params: &HistParams) -> Result<()> {
    if let Some((&last, _)) = data.counts.iter().next_back() {
        if last >= params.universe {
            return Err(Error::ValueOutOfRange {
                value: last,
                limit: params.universe,
            });
        }
    }
    if data.size() > params.n {
        return Err(invalid(format!(
            "dataset size {} exceeds the bound n = {}",
            data.size(),
            params.n
        )));
    }
    Ok(())
}

/// ORs `encode(y_i)` into the table: bit `b` of element `i` lands at row
/// `h_b(i)` of column `b`.
pub fn project(
    data: &Dataset,
    params: &HistParams,
    codec: &SharedCodec,
    seeds: &HashSeeds,
    rounding: &Rounding,
) -> Result<Projection> {
    check_elements(data, params)?;
    let dprime = codec.params().block_len;
    if seeds.columns.len() != dprime && !seeds.injective {
        return Err(Error::LengthMismatch {
            expected: dprime,
            actual: seeds.columns.len(),
        });
    }
    let mut columns = vec![BitString::zeros(params.s as usize); dprime];
    for (&i, &x) in &data.counts {
        let y = rounding.scaled(params, i, x);
        let word = codec.encode(y)?;
        for b in word.one_indices0() {
            columns[b].set0(seeds.row(b, i, params.s) as usize, true);
        }
    }
    Ok(Projection { columns })
}

/// Flips every table bit independently with probability `q`.
pub fn randomize(proj: &Projection, q: f64, rng: &mut RandomSource) -> Projection {
    if q == 0.0 {
        return proj.clone();
    }
    let columns = proj
        .columns
        .iter()
        .map(|col| {
            let mut out = col.clone();
            for i in 0..col.len() {
                if rng.random_bool(q) {
                    out.flip0(i);
                }
            }
            out
        })
        .collect();
    Projection { columns }
}

/// Table bits that differ between the projections of two datasets under
/// the same hash functions and rounding draws.
pub fn neighbor_sensitivity(
    a: &Dataset,
    b: &Dataset,
    params: &HistParams,
    seeds: &HashSeeds,
    rounding: &Rounding,
) -> Result<usize> {
    let codec = params.validate()?;
    let pa = project(a, params, &codec, seeds, rounding)?;
    let pb = project(b, params, &codec, seeds, rounding)?;
    Ok(pa.distance(&pb))
}

/// Work done by one query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub table_reads: usize,
    pub decodes: usize,
    pub heavy_hit: bool,
}

/// The released sketch.
#[derive(Clone, Debug)]
pub struct PrivateHistogram {
    params: HistParams,
    seed: u64,
    seeds: HashSeeds,
    table: Projection,
    heavy: BTreeMap<u64, i64>,
    codec: SharedCodec,
}

impl PartialEq for PrivateHistogram {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.seed == other.seed
            && self.seeds == other.seeds
            && self.table == other.table
            && self.heavy == other.heavy
    }
}

impl PrivateHistogram {
    /// Streams are split off `seed` by purpose: `hash`, `round`, `rr` and
    /// `laplace`.
    pub fn build(data: &Dataset, params: &HistParams, seed: u64) -> Result<Self> {
        let codec = params.validate()?;
        check_elements(data, params)?;
        let root = RandomSource::new(seed);
        let seeds = HashSeeds::sample(codec.params().block_len, params.injective_hash, &root);
        let rounding = Rounding::new(root.split("round").seed());
        let mut laplace = root.split("laplace");
        let mut heavy = BTreeMap::new();
        for (&i, &x) in &data.counts {
            let noisy = x as i64 + discrete_laplace(&mut laplace, params.laplace_scale)?;
            if noisy as f64 >= params.threshold {
                heavy.insert(i, noisy);
            }
        }
        let proj = project(data, params, &codec, &seeds, &rounding)?;
        let table = randomize(&proj, params.q, &mut root.split("rr"));
        Ok(PrivateHistogram {
            params: params.clone(),
            seed,
            seeds,
            table,
            heavy,
            codec,
        })
    }

    fn from_parts(
        params: HistParams,
        seed: u64,
        seeds: HashSeeds,
        table: Projection,
        heavy: BTreeMap<u64, i64>,
    ) -> Result<Self> {
        let codec = params.validate()?;
        let dprime = codec.params().block_len;
        if table.columns.len() != dprime || table.columns.iter().any(|c| c.len() as u64 != params.s)
        {
            return Err(Error::Parse("table shape does not match parameters".into()));
        }
        Ok(PrivateHistogram {
            params,
            seed,
            seeds,
            table,
            heavy,
            codec: Arc::clone(&codec),
        })
    }

    pub fn params(&self) -> &HistParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn hash_seeds(&self) -> &HashSeeds {
        &self.seeds
    }

    pub fn table(&self) -> &Projection {
        &self.table
    }

    pub fn heavy(&self) -> &BTreeMap<u64, i64> {
        &self.heavy
    }

    /// Codeword block length `d'`.
    pub fn dprime(&self) -> usize {
        self.table.columns.len()
    }

    /// The `d'` bits read for an element, in codeword order.
    pub fn read_word(&self, element: u64) -> BitString {
        BitString::from_fn(self.dprime(), |b| {
            self.table.bit(self.seeds.row(b, element, self.params.s), b)
        })
    }

    pub fn estimate(&self, element: u64) -> Result<f64> {
        Ok(self.estimate_with_stats(element)?.0)
    }

    pub fn estimate_with_stats(&self, element: u64) -> Result<(f64, QueryStats)> {
        if element >= self.params.universe {
            return Err(Error::ValueOutOfRange {
                value: element,
                limit: self.params.universe,
            });
        }
        if let Some(&c) = self.heavy.get(&element) {
            return Ok((
                c as f64,
                QueryStats {
                    heavy_hit: true,
                    ..QueryStats::default()
                },
            ));
        }
        let word = self.read_word(element);
        let y = self.codec.decode(&word)?.min(self.params.ell);
        Ok((
            y as f64 / self.params.gamma,
            QueryStats {
                table_reads: self.dprime(),
                decodes: 1,
                heavy_hit: false,
            },
        ))
    }
}
