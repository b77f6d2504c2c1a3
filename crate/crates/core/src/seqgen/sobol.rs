//! Sobol' generating matrices from primitive-polynomial direction numbers.

use std::path::Path;

use crate::error::{invalid, QmcError, Result};

use super::digital::DigitalSpec;
use super::vdc::PRECISION_BITS;

const BUNDLED: &str = include_str!("../../data/sobol_directions.txt");

/// Column count used when none is requested: up to 2^32 points.
pub const DEFAULT_COLUMNS: u32 = 32;

/// One line of a direction-number table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionEntry {
    pub dim: usize,
    pub degree: u32,
    pub coeffs: u64,
    pub initial: Vec<u64>,
}

/// Parses `d s a m_1 .. m_s` lines; `#` starts a comment.
pub fn parse_direction_numbers(text: &str) -> Result<Vec<DirectionEntry>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<u64> = line
            .split_whitespace()
            .map(|t| t.parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| QmcError::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        let bad = |message: String| QmcError::Parse {
            line: line_no,
            message,
        };
        if fields.len() < 4 {
            return Err(bad(format!(
                "expected `d s a m_1 .. m_s`, found {} fields",
                fields.len()
            )));
        }
        let (dim, degree, coeffs) = (fields[0] as usize, fields[1] as u32, fields[2]);
        if degree == 0 || degree > 31 {
            return Err(bad(format!("polynomial degree {degree} out of range")));
        }
        let initial = fields[3..].to_vec();
        if initial.len() != degree as usize {
            return Err(bad(format!(
                "degree {degree} needs {degree} initial values, found {}",
                initial.len()
            )));
        }
        if coeffs >> (degree - 1) != 0 {
            return Err(bad(format!(
                "coefficient word {coeffs} does not fit degree {degree}"
            )));
        }
        for (k, &m) in initial.iter().enumerate() {
            if m % 2 == 0 || m >> (k + 1) != 0 {
                return Err(bad(format!(
                    "m_{} = {m} must be odd and below 2^{}",
                    k + 1,
                    k + 1
                )));
            }
        }
        let expected = out.last().map_or(2, |e: &DirectionEntry| e.dim + 1);
        if dim != expected {
            return Err(bad(format!("expected dimension {expected}, found {dim}")));
        }
        out.push(DirectionEntry {
            dim,
            degree,
            coeffs,
            initial,
        });
    }
    Ok(out)
}

/// Direction integers `m_1 .. m_count` via the primitive-polynomial recurrence.
fn direction_integers(e: &DirectionEntry, count: usize) -> Vec<u64> {
    let s = e.degree as usize;
    let mut m: Vec<u64> = e.initial.iter().copied().take(count).collect();
    for k in s..count {
        let mut v = m[k - s] ^ (m[k - s] << s);
        for i in 1..s {
            // a_i is bit s-1-i of the packed word, a_1 most significant
            if (e.coeffs >> (s - 1 - i)) & 1 == 1 {
                v ^= m[k - i] << i;
            }
        }
        m.push(v);
    }
    m
}

/// Sobol' spec from a parsed table. Dimension 1 is the identity matrix.
pub fn sobol_spec_from_entries(
    d: usize,
    entries: &[DirectionEntry],
    n_cols: u32,
) -> Result<DigitalSpec> {
    let m_rows = PRECISION_BITS;
    if d == 0 {
        return invalid("dimension must be at least 1");
    }
    if n_cols > m_rows {
        return invalid(format!(
            "at most {m_rows} columns are supported, got {n_cols}"
        ));
    }
    if entries.len() + 1 < d {
        return invalid(format!(
            "direction table covers {} dimensions, {d} requested",
            entries.len() + 1
        ));
    }
    let mut columns = vec![DigitalSpec::identity_columns(m_rows, n_cols)];
    for e in &entries[..d - 1] {
        let m = direction_integers(e, n_cols as usize);
        // v_k = m_k / 2^k, so column k holds m_k shifted to the top of an M-bit word
        columns.push(
            m.iter()
                .enumerate()
                .map(|(k, &mk)| mk << (m_rows as usize - k - 1))
                .collect(),
        );
    }
    DigitalSpec::new(m_rows, n_cols, columns)
}

/// Sobol' spec from a direction-number file.
pub fn sobol_spec(d: usize, direction_file: impl AsRef<Path>) -> Result<DigitalSpec> {
    let text = std::fs::read_to_string(direction_file)?;
    sobol_spec_from_entries(d, &parse_direction_numbers(&text)?, DEFAULT_COLUMNS)
}

/// Sobol' spec from the bundled table (dimensions 1 through 1024).
pub fn sobol_spec_bundled(d: usize) -> Result<DigitalSpec> {
    sobol_spec_bundled_with_columns(d, DEFAULT_COLUMNS)
}

pub fn sobol_spec_bundled_with_columns(d: usize, n_cols: u32) -> Result<DigitalSpec> {
    let entries = bundled_entries();
    sobol_spec_from_entries(d, entries, n_cols)
}

pub fn bundled_max_dimension() -> usize {
    bundled_entries().len() + 1
}

fn bundled_entries() -> &'static [DirectionEntry] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<DirectionEntry>> = OnceLock::new();
    TABLE.get_or_init(|| {
        parse_direction_numbers(BUNDLED).expect("bundled direction numbers are well formed")
    })
}
