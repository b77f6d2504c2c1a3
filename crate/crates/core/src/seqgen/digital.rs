use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, QmcError, Result};
use crate::points::PointSet;

use super::vdc::PRECISION_BITS;

/// Base-2 generating matrices, one per dimension, packed by column.
///
/// Column `i` of dimension `j` is an `m_rows`-bit integer whose bit
/// `m_rows - l` holds the matrix entry in row `l` (row 1 is the most
/// significant digit).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitalSpec {
    m_rows: u32,
    n_cols: u32,
    columns: Vec<Vec<u64>>,
}

impl DigitalSpec {
    pub fn new(m_rows: u32, n_cols: u32, columns: Vec<Vec<u64>>) -> Result<Self> {
        if m_rows == 0 || m_rows > PRECISION_BITS {
            return invalid(format!("row count must lie in 1..=52, got {m_rows}"));
        }
        if n_cols > 63 {
            return invalid(format!("column count must be at most 63, got {n_cols}"));
        }
        if columns.is_empty() {
            return invalid("a digital spec needs at least one dimension");
        }
        for (j, cols) in columns.iter().enumerate() {
            if cols.len() != n_cols as usize {
                return invalid(format!(
                    "dimension {} has {} columns, expected {n_cols}",
                    j + 1,
                    cols.len()
                ));
            }
            if let Some(&c) = cols.iter().find(|&&c| c >> m_rows != 0) {
                return invalid(format!(
                    "column {c} of dimension {} needs more than {m_rows} bits",
                    j + 1
                ));
            }
        }
        Ok(DigitalSpec {
            m_rows,
            n_cols,
            columns,
        })
    }

    pub fn d(&self) -> usize {
        self.columns.len()
    }

    pub fn m_rows(&self) -> u32 {
        self.m_rows
    }

    pub fn n_cols(&self) -> u32 {
        self.n_cols
    }

    pub fn columns(&self, j: usize) -> &[u64] {
        &self.columns[j]
    }

    pub fn capacity(&self) -> u128 {
        1u128 << self.n_cols
    }

    /// Matrix entry in row `row` (1-based) and column `col` (0-based) of dimension `j`.
    #[inline]
    pub fn entry(&self, j: usize, row: u32, col: usize) -> u64 {
        (self.columns[j][col] >> (self.m_rows - row)) & 1
    }

    /// Leading `rows` rows restricted to the first `cols` columns, each row packed
    /// with column `c` at bit `c`.
    pub fn leading_rows(&self, j: usize, rows: u32, cols: u32) -> Vec<u64> {
        (1..=rows)
            .map(|l| (0..cols as usize).fold(0u64, |acc, c| acc | (self.entry(j, l, c) << c)))
            .collect()
    }

    pub fn project(&self, k: usize) -> Result<DigitalSpec> {
        if k == 0 || k > self.d() {
            return invalid(format!(
                "cannot project a {}-dimensional spec to {k}",
                self.d()
            ));
        }
        DigitalSpec::new(self.m_rows, self.n_cols, self.columns[..k].to_vec())
    }

    /// Identity generating matrix in one dimension: the base-2 van der Corput sequence.
    pub fn identity_columns(m_rows: u32, n_cols: u32) -> Vec<u64> {
        (1..=n_cols)
            .map(|k| if k <= m_rows { 1u64 << (m_rows - k) } else { 0 })
            .collect()
    }

    /// Parses the interchange format: a `d M N` header then `d` lines of `N` column integers.
    pub fn parse(text: &str) -> Result<DigitalSpec> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or(QmcError::Parse {
            line: 1,
            message: "empty file".into(),
        })?;
        let head: Vec<u64> = parse_ints(hl, header)?;
        if head.len() != 3 {
            return Err(QmcError::Parse {
                line: hl,
                message: "header must be `d M N`".into(),
            });
        }
        let (d, m, n) = (head[0] as usize, head[1] as u32, head[2] as u32);
        let mut columns = Vec::with_capacity(d);
        for (ln, l) in lines.by_ref().take(d) {
            let cols = parse_ints(ln, l)?;
            if cols.len() != n as usize {
                return Err(QmcError::Parse {
                    line: ln,
                    message: format!("expected {n} columns, found {}", cols.len()),
                });
            }
            columns.push(cols);
        }
        if columns.len() != d {
            return Err(QmcError::Parse {
                line: text.lines().count(),
                message: format!("expected {d} dimensions, found {}", columns.len()),
            });
        }
        if let Some((ln, _)) = lines.next() {
            return Err(QmcError::Parse {
                line: ln,
                message: "trailing data after last dimension".into(),
            });
        }
        DigitalSpec::new(m, n, columns)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<DigitalSpec> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.d(), self.m_rows, self.n_cols);
        for cols in &self.columns {
            let line: Vec<String> = cols.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

fn parse_ints(line: usize, s: &str) -> Result<Vec<u64>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<u64>().map_err(|e| QmcError::Parse {
                line,
                message: format!("`{t}`: {e}"),
            })
        })
        .collect()
}

/// The first `n` points, built by xoring basis points (one column per binary digit of the index).
pub fn digital_points(spec: &DigitalSpec, n: usize) -> Result<PointSet> {
    digital_points_range(spec, 0, n)
}

/// Points `start .. start + count` as raw `m_rows`-bit integers, row-major.
pub fn digital_bits_range(spec: &DigitalSpec, start: u64, count: usize) -> Result<Vec<u64>> {
    let end = start as u128 + count as u128;
    if end > spec.capacity() {
        return Err(QmcError::TooManyPoints {
            requested: end,
            max: spec.capacity(),
        });
    }
    let d = spec.d();
    let mut out = Vec::with_capacity(count * d);
    if count == 0 {
        return Ok(out);
    }
    // prefix[j][k] = C_0 ^ ... ^ C_k; stepping i -> i+1 flips index bits 0..=tz(i+1)
    let prefix: Vec<Vec<u64>> = spec
        .columns
        .iter()
        .map(|cols| {
            cols.iter()
                .scan(0u64, |acc, &c| {
                    *acc ^= c;
                    Some(*acc)
                })
                .collect()
        })
        .collect();
    let mut cur: Vec<u64> = spec
        .columns
        .iter()
        .map(|cols| xor_columns(cols, start))
        .collect();
    out.extend_from_slice(&cur);
    for i in start + 1..start + count as u64 {
        let k = i.trailing_zeros() as usize;
        for (x, p) in cur.iter_mut().zip(&prefix) {
            *x ^= p[k];
        }
        out.extend_from_slice(&cur);
    }
    Ok(out)
}

#[inline]
fn xor_columns(cols: &[u64], mut i: u64) -> u64 {
    let mut acc = 0;
    let mut c = 0;
    while i != 0 {
        if i & 1 == 1 {
            acc ^= cols[c];
        }
        i >>= 1;
        c += 1;
    }
    acc
}

pub fn digital_points_range(spec: &DigitalSpec, start: u64, count: usize) -> Result<PointSet> {
    let bits = digital_bits_range(spec, start, count)?;
    let scale = 1.0 / (1u64 << spec.m_rows) as f64;
    let coords = bits.into_iter().map(|b| b as f64 * scale).collect();
    Ok(PointSet::from_raw(count, spec.d(), coords))
}

/// The same points computed digit by digit as a matrix-vector product modulo 2.
/// Slower than [`digital_points`]; kept as an independent route.
pub fn digital_points_by_matrix(spec: &DigitalSpec, n: usize) -> Result<PointSet> {
    if n as u128 > spec.capacity() {
        return Err(QmcError::TooManyPoints {
            requested: n as u128,
            max: spec.capacity(),
        });
    }
    let m = spec.m_rows;
    let mut coords = Vec::with_capacity(n * spec.d());
    for i in 0..n as u64 {
        let digits: Vec<u64> = (0..spec.n_cols).map(|k| (i >> k) & 1).collect();
        for j in 0..spec.d() {
            let mut x = 0.0;
            for l in 1..=m {
                let bit = (0..spec.n_cols as usize)
                    .fold(0u64, |acc, c| acc ^ (spec.entry(j, l, c) & digits[c]));
                if bit == 1 {
                    x += (-(l as f64)).exp2();
                }
            }
            coords.push(x);
        }
    }
    Ok(PointSet::from_raw(n, spec.d(), coords))
}
