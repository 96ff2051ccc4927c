//! Sketch file layout, all integers little-endian:
//!
//! ```text
//! "ECGH" | version u16 | universe n ell s u64 x4 | eps q gamma threshold laplace f64 x5
//! | flags u8 (1 = injective hash, 2 = non-private debug) | inner descriptor (u32 len + utf8)
//! | seed u64 | d' u32 | d' x (a u64, b u64) | d' columns x ceil(s/64) words u64
//! | heavy count u64 | (element u64, count i64) sorted by element
//! ```

use std::collections::BTreeMap;

use super::{HashSeeds, HistParams, MultiplyShift, PrivateHistogram, Projection};
use crate::bitcore::BitString;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"ECGH";
pub const FORMAT_VERSION: u16 = 1;

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::Parse("sketch file is truncated".into()));
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }
}

impl PrivateHistogram {
    pub fn to_bytes(&self) -> Vec<u8> {
        let p = &self.params;
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        for v in [p.universe, p.n, p.ell, p.s] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in [p.eps, p.q, p.gamma, p.threshold, p.laplace_scale] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.push(p.injective_hash as u8 | (p.non_private_debug as u8) << 1);
        out.extend_from_slice(&(p.inner.len() as u32).to_le_bytes());
        out.extend_from_slice(p.inner.as_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&(self.seeds.columns.len() as u32).to_le_bytes());
        for h in &self.seeds.columns {
            out.extend_from_slice(&h.a.to_le_bytes());
            out.extend_from_slice(&h.b.to_le_bytes());
        }
        for col in &self.table.columns {
            for w in col.words() {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
        out.extend_from_slice(&(self.heavy.len() as u64).to_le_bytes());
        for (&e, &c) in &self.heavy {
            out.extend_from_slice(&e.to_le_bytes());
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { buf: bytes };
        if r.take(4)? != MAGIC {
            return Err(Error::Parse("not a sketch file (bad magic)".into()));
        }
        let version = u16::from_le_bytes(r.array()?);
        if version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported sketch version {version}, expected {FORMAT_VERSION}"
            )));
        }
        let (universe, n, ell, s) = (r.u64()?, r.u64()?, r.u64()?, r.u64()?);
        let (eps, q, gamma, threshold, laplace_scale) =
            (r.f64()?, r.f64()?, r.f64()?, r.f64()?, r.f64()?);
        let [flags] = r.array()?;
        let len = u32::from_le_bytes(r.array()?) as usize;
        let inner = String::from_utf8(r.take(len)?.to_vec())
            .map_err(|_| Error::Parse("inner descriptor is not utf-8".into()))?;
        let params = HistParams {
            universe,
            n,
            eps,
            ell,
            s,
            q,
            gamma,
            threshold,
            laplace_scale,
            inner,
            injective_hash: flags & 1 != 0,
            non_private_debug: flags & 2 != 0,
        };
        let seed = r.u64()?;
        let dprime = u32::from_le_bytes(r.array()?) as usize;
        let mut columns = Vec::with_capacity(dprime);
        for _ in 0..dprime {
            columns.push(MultiplyShift {
                a: r.u64()?,
                b: r.u64()?,
            });
        }
        let words = (s as usize).div_ceil(64);
        let mut table = Vec::with_capacity(dprime);
        for _ in 0..dprime {
            let col: Vec<u64> = (0..words).map(|_| r.u64()).collect::<Result<_>>()?;
            table.push(BitString::from_words(s as usize, col)?);
        }
        let heavy_len = r.u64()?;
        let mut heavy = BTreeMap::new();
        let mut last = None;
        for _ in 0..heavy_len {
            let e = r.u64()?;
            let c = i64::from_le_bytes(r.array()?);
            if last.is_some_and(|l| l >= e) {
                return Err(Error::Parse("heavy entries are not sorted".into()));
            }
            last = Some(e);
            heavy.insert(e, c);
        }
        if !r.buf.is_empty() {
            return Err(Error::Parse(format!("{} trailing bytes", r.buf.len())));
        }
        let seeds = HashSeeds {
            columns,
            injective: params.injective_hash,
        };
        PrivateHistogram::from_parts(params, seed, seeds, Projection { columns: table }, heavy)
    }

    /// Readable dump: parameters, hash seeds, table columns as 0/1 strings
    /// and the heavy store.
    pub fn to_debug_json(&self) -> String {
        let table: Vec<String> = self.table.columns.iter().map(|c| c.to_string()).collect();
        let heavy: Vec<(u64, i64)> = self.heavy.iter().map(|(&e, &c)| (e, c)).collect();
        let v = serde_json::json!({
            "format_version": FORMAT_VERSION,
            "params": self.params,
            "seed": self.seed,
            "hash_seeds": self.seeds,
            "table_columns": table,
            "heavy": heavy,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::super::Dataset;
    use super::*;

    #[test]
    fn roundtrip_is_bit_exact() {
        let p = HistParams::new(1 << 12, 600, 1.5).unwrap();
        let data = Dataset::from_counts(
            (0..60)
                .map(|i| (i * 37 % 4096, 1 + i % 9))
                .chain([(11, 200)]),
        );
        let h = PrivateHistogram::build(&data, &p, 42).unwrap();
        assert!(!h.heavy().is_empty());
        let bytes = h.to_bytes();
        let back = PrivateHistogram::from_bytes(&bytes).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.to_bytes(), bytes);
        for i in 0..200 {
            assert_eq!(back.estimate(i).unwrap(), h.estimate(i).unwrap());
        }
        // header + seeds + s d' bits + 16 bytes per heavy entry
        let header = 4 + 2 + 32 + 40 + 1 + 4 + p.inner.len() + 8 + 4 + 16 * 30;
        let table = 30 * (p.s as usize).div_ceil(64) * 8;
        assert_eq!(bytes.len(), header + table + 8 + 16 * h.heavy().len());
    }

    #[test]
    fn rejects_corruption() {
        let p = HistParams::new(1 << 8, 10, 1.0).unwrap();
        let h = PrivateHistogram::build(&Dataset::from_elements([1, 2, 2]), &p, 1).unwrap();
        let bytes = h.to_bytes();
        assert!(PrivateHistogram::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(PrivateHistogram::from_bytes(&bad).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(PrivateHistogram::from_bytes(&extra).is_err());
        assert!(h.to_debug_json().contains("\"table_columns\""));
    }
}
