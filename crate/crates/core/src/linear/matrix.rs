use std::fmt;

use crate::bitcore::BitString;
use crate::error::{invalid, Error, Result};

/// `n x d` generator over GF(2). Row 1 is selected by the least significant
/// message bit.
#[derive(Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    rows: Vec<BitString>,
    block_len: usize,
}

impl GeneratorMatrix {
    /// Rejects ragged rows, `n > d`, and linearly dependent rows.
    pub fn new(rows: Vec<BitString>) -> Result<Self> {
        let block_len = rows
            .first()
            .map(BitString::len)
            .ok_or_else(|| invalid("generator matrix needs at least one row"))?;
        if block_len == 0 {
            return Err(invalid("generator rows must be non-empty"));
        }
        for r in &rows {
            r.expect_len(block_len)?;
        }
        if rows.len() > block_len {
            return Err(invalid(format!(
                "{} rows exceed block length {block_len}",
                rows.len()
            )));
        }
        if rank(&rows) != rows.len() {
            return Err(invalid("generator rows are linearly dependent"));
        }
        Ok(GeneratorMatrix { rows, block_len })
    }

    pub fn from_rows_text(rows: &[&str]) -> Result<Self> {
        GeneratorMatrix::new(
            rows.iter()
                .map(|r| r.parse())
                .collect::<Result<Vec<BitString>>>()?,
        )
    }

    /// Text form: `"n d"` on the first line, then `n` rows of `d` characters.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad dimension {t:?}")))
            })
            .collect::<Result<_>>()?;
        let [n, d] = dims[..] else {
            return Err(Error::Parse(format!("expected \"n d\", got {header:?}")));
        };
        let rows: Vec<BitString> = lines.map(str::parse).collect::<Result<_>>()?;
        if rows.len() != n {
            return Err(Error::Parse(format!(
                "header says {n} rows, found {}",
                rows.len()
            )));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::Parse(format!(
                "row {bad} has {} bits, header says {d}",
                bad.len()
            )));
        }
        GeneratorMatrix::new(rows)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.message_bits(), self.block_len);
        for r in &self.rows {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }

    pub fn message_bits(&self) -> usize {
        self.rows.len()
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn rows(&self) -> &[BitString] {
        &self.rows
    }

    /// XOR of the rows selected by the message bits (bit `i` -> row `i`).
    pub fn encode_bits(&self, message: &BitString) -> Result<BitString> {
        message.expect_len(self.rows.len())?;
        let mut out = BitString::zeros(self.block_len);
        for i in message.one_indices0() {
            out.xor_assign(&self.rows[i]);
        }
        Ok(out)
    }

    pub fn encode_u64(&self, v: u64) -> Result<BitString> {
        let n = self.rows.len();
        if n < 64 && v >> n != 0 {
            return Err(Error::ValueOutOfRange {
                value: v,
                limit: 1 << n,
            });
        }
        let mut out = BitString::zeros(self.block_len);
        let mut rest = v;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            out.xor_assign(&self.rows[i]);
            rest &= rest - 1;
        }
        Ok(out)
    }

    /// First `k` rows: the subcode of messages below `2^k`.
    pub fn truncated(&self, k: usize) -> Result<GeneratorMatrix> {
        if k == 0 || k > self.rows.len() {
            return Err(invalid(format!(
                "cannot keep {k} of {} rows",
                self.rows.len()
            )));
        }
        Ok(GeneratorMatrix {
            rows: self.rows[..k].to_vec(),
            block_len: self.block_len,
        })
    }
}

impl fmt::Debug for GeneratorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.rows.iter().map(|r| r.to_string()))
            .finish()
    }
}

/// Reduced row echelon form with the pivot column of each remaining row.
/// Pivoting takes the first column holding a one, row swaps only.
pub(crate) struct Echelon {
    pub rows: Vec<BitString>,
    pub pivots: Vec<usize>,
    /// Row operations applied, as a matrix `T` with `T * input = rows`
    /// (restricted to the first `pivots.len()` rows).
    pub transform: Vec<BitString>,
}

pub(crate) fn echelon(input: &[BitString]) -> Echelon {
    let n = input.len();
    let width = input.first().map_or(0, BitString::len);
    let mut rows = input.to_vec();
    let mut transform: Vec<BitString> = (0..n).map(|i| BitString::from_fn(n, |j| i == j)).collect();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..width {
        if next == n {
            break;
        }
        let Some(found) = (next..n).find(|&r| rows[r].get0(col)) else {
            continue;
        };
        rows.swap(next, found);
        transform.swap(next, found);
        for r in 0..n {
            if r != next && rows[r].get0(col) {
                let (pivot_row, pivot_t) = (rows[next].clone(), transform[next].clone());
                rows[r].xor_assign(&pivot_row);
                transform[r].xor_assign(&pivot_t);
            }
        }
        pivots.push(col);
        next += 1;
    }
    rows.truncate(next);
    transform.truncate(next);
    Echelon {
        rows,
        pivots,
        transform,
    }
}

pub(crate) fn rank(rows: &[BitString]) -> usize {
    echelon(rows).pivots.len()
}

/// Basis of `{ y : <row, y> = 0 for every row }`, one vector per free column.
pub(crate) fn null_space(rows: &[BitString], width: usize) -> Vec<BitString> {
    let e = echelon(rows);
    let mut is_pivot = vec![false; width];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    (0..width)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut y = BitString::zeros(width);
            y.set0(f, true);
            for (row, &p) in e.rows.iter().zip(&e.pivots) {
                if row.get0(f) {
                    y.set0(p, true);
                }
            }
            y
        })
        .collect()
}

/// Recovers message bits from a codeword: `message = x[columns] * inverse`.
#[derive(Clone, Debug)]
pub(crate) struct InfoSet {
    columns: Vec<usize>,
    inverse: Vec<BitString>,
}

impl InfoSet {
    pub fn new(g: &GeneratorMatrix) -> InfoSet {
        let e = echelon(g.rows());
        InfoSet {
            columns: e.pivots,
            inverse: e.transform,
        }
    }

    pub fn message_of(&self, codeword: &BitString) -> BitString {
        let n = self.inverse.len();
        let mut m = BitString::zeros(n);
        for (i, &col) in self.columns.iter().enumerate() {
            if codeword.get0(col) {
                m.xor_assign(&self.inverse[i]);
            }
        }
        m
    }
}
