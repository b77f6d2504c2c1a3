//! Randomizations that keep low discrepancy: shifts, digital shifts, linear
//! matrix scrambles, Halton digit permutations and random generators.
//!
//! Every routine is a pure function of its inputs and a 64-bit seed. The value
//! drawn for dimension `j` comes from the stream `(seed, role, j)`, so e.g.
//! [`digital_shift`] applied to points and the shift folded into
//! [`linear_scramble`]'s state agree when given the same seed.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, QmcError, Result};
use crate::points::PointSet;
use crate::rng::{Role, Stream};
use crate::seqgen::halton::{digit_depth, DigitPermutations};
use crate::seqgen::vdc::{bits_to_unit, unit_to_bits, PRECISION_BITS};
use crate::seqgen::{DigitalSpec, HaltonSpec, LatticeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RandomizeKind {
    None,
    ShiftMod1,
    DigitalShift,
    /// Linear matrix scramble followed by a digital shift.
    LinearScramble,
    HaltonPermute,
}

impl RandomizeKind {
    pub fn name(self) -> &'static str {
        match self {
            RandomizeKind::None => "none",
            RandomizeKind::ShiftMod1 => "shift",
            RandomizeKind::DigitalShift => "digital-shift",
            RandomizeKind::LinearScramble => "lms",
            RandomizeKind::HaltonPermute => "permute",
        }
    }
}

impl fmt::Display for RandomizeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RandomizeKind {
    type Err = QmcError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "none" => RandomizeKind::None,
            "shift" | "shift-mod1" => RandomizeKind::ShiftMod1,
            "digital-shift" => RandomizeKind::DigitalShift,
            "lms" | "linear-scramble" => RandomizeKind::LinearScramble,
            "permute" | "halton-permute" => RandomizeKind::HaltonPermute,
            other => return invalid(format!("unknown randomization `{other}`")),
        })
    }
}

/// Sequence families, used to check that a randomization fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Lattice,
    Digital,
    Halton,
    Hammersley,
    Grid,
    Iid,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Lattice => "lattice",
            Family::Digital => "sobol",
            Family::Halton => "halton",
            Family::Hammersley => "hammersley",
            Family::Grid => "grid",
            Family::Iid => "iid",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = QmcError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lattice" => Family::Lattice,
            "sobol" | "digital" | "net" => Family::Digital,
            "halton" => Family::Halton,
            "hammersley" => Family::Hammersley,
            "grid" => Family::Grid,
            "iid" => Family::Iid,
            other => return invalid(format!("unknown sequence family `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomizeSpec {
    pub kind: RandomizeKind,
    pub seed: u64,
}

impl RandomizeSpec {
    pub fn new(kind: RandomizeKind, seed: u64) -> Self {
        RandomizeSpec { kind, seed }
    }

    /// Rejects pairings such as a modulo-1 shift on a digital net.
    pub fn check_family(&self, family: Family) -> Result<()> {
        let ok = match self.kind {
            RandomizeKind::None => true,
            RandomizeKind::ShiftMod1 => family == Family::Lattice,
            RandomizeKind::DigitalShift | RandomizeKind::LinearScramble => {
                family == Family::Digital
            }
            RandomizeKind::HaltonPermute => family == Family::Halton,
        };
        if ok {
            Ok(())
        } else {
            Err(QmcError::IncompatibleRandomization {
                family: family.name(),
                randomization: self.kind.name(),
            })
        }
    }
}

/// One uniform shift per dimension.
pub fn shift_vector(seed: u64, d: usize) -> Vec<f64> {
    (0..d)
        .map(|j| Stream::new(seed, Role::ShiftMod1, j as u64).uniform())
        .collect()
}

/// `x + delta mod 1` coordinatewise.
pub fn shift_mod1_by(points: &PointSet, delta: &[f64]) -> Result<PointSet> {
    if delta.len() != points.d() {
        return Err(QmcError::DimensionMismatch {
            expected: points.d(),
            got: delta.len(),
        });
    }
    let coords = points
        .rows()
        .flat_map(|p| p.iter().zip(delta).map(|(&x, &s)| wrap_add(x, s)))
        .collect();
    Ok(PointSet::from_raw(points.n(), points.d(), coords))
}

#[inline]
pub(crate) fn wrap_add(x: f64, s: f64) -> f64 {
    let y = x + s;
    if y >= 1.0 {
        y - 1.0
    } else {
        y
    }
}

/// Shift modulo 1 by a single uniform vector drawn from `seed`.
pub fn shift_mod1(points: &PointSet, seed: u64) -> PointSet {
    shift_mod1_by(points, &shift_vector(seed, points.d())).expect("shift has matching dimension")
}

/// One `bits`-bit digital shift per dimension, aligned to the top of a 52-bit word.
pub fn digital_shift_vector(seed: u64, d: usize) -> Vec<u64> {
    (0..d)
        .map(|j| Stream::new(seed, Role::DigitalShift, j as u64).bits(PRECISION_BITS))
        .collect()
}

/// `x xor delta` on 52-bit expansions. Digits below 2^-52 are dropped.
pub fn digital_shift_by(points: &PointSet, delta: &[u64]) -> Result<PointSet> {
    if delta.len() != points.d() {
        return Err(QmcError::DimensionMismatch {
            expected: points.d(),
            got: delta.len(),
        });
    }
    let coords = points
        .rows()
        .flat_map(|p| {
            p.iter()
                .zip(delta)
                .map(|(&x, &s)| bits_to_unit(unit_to_bits(x) ^ s))
        })
        .collect();
    Ok(PointSet::from_raw(points.n(), points.d(), coords))
}

pub fn digital_shift(points: &PointSet, seed: u64) -> PointSet {
    digital_shift_by(points, &digital_shift_vector(seed, points.d()))
        .expect("shift has matching dimension")
}

/// Random lower-triangular scrambling matrices and the accompanying digital shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScrambleState {
    m_rows: u32,
    /// `lower[j][l - 1]` is row `l` of `L_j`, entry in column `k` at bit `m_rows - k`.
    lower: Vec<Vec<u64>>,
    /// Per-dimension shift digits, aligned like generating-matrix columns.
    shift: Vec<u64>,
}

impl ScrambleState {
    pub fn lower(&self, j: usize) -> &[u64] {
        &self.lower[j]
    }

    pub fn shift(&self) -> &[u64] {
        &self.shift
    }

    /// Unit diagonal and nothing above it.
    pub fn is_unit_lower_triangular(&self) -> bool {
        let m = self.m_rows;
        self.lower.iter().all(|rows| {
            rows.iter().enumerate().all(|(idx, &row)| {
                let l = idx as u32 + 1;
                let diag = (row >> (m - l)) & 1 == 1;
                // bits for columns k > l sit below bit m - l
                let above = row & ((1u64 << (m - l)) - 1);
                diag && above == 0
            })
        })
    }

    /// Applies the stored digital shift to points of the scrambled spec.
    pub fn apply_shift(&self, points: &PointSet) -> Result<PointSet> {
        let aligned: Vec<u64> = self
            .shift
            .iter()
            .map(|&s| s << (PRECISION_BITS - self.m_rows))
            .collect();
        digital_shift_by(points, &aligned)
    }
}

/// Multiplies every generating matrix on the left by a random unit lower
/// triangular matrix. Returns the scrambled spec (still extensible) and the
/// state holding the matrices and the digital shift to apply afterwards.
pub fn linear_scramble(spec: &DigitalSpec, seed: u64) -> (DigitalSpec, ScrambleState) {
    let m = spec.m_rows();
    let mut lower = Vec::with_capacity(spec.d());
    let mut shift = Vec::with_capacity(spec.d());
    let mut columns = Vec::with_capacity(spec.d());
    for j in 0..spec.d() {
        let mut s = Stream::new(seed, Role::ScrambleMatrix, j as u64);
        let rows: Vec<u64> = (1..=m)
            .map(|l| {
                // columns 1..l-1 random, column l one
                let random = if l > 1 {
                    s.bits(l - 1) << (m - l + 1)
                } else {
                    0
                };
                random | (1u64 << (m - l))
            })
            .collect();
        let scrambled: Vec<u64> = spec
            .columns(j)
            .iter()
            .map(|&c| mat_vec(&rows, c, m))
            .collect();
        columns.push(scrambled);
        lower.push(rows);
        shift.push(
            Stream::new(seed, Role::DigitalShift, j as u64).bits(PRECISION_BITS)
                >> (PRECISION_BITS - m),
        );
    }
    let scrambled =
        DigitalSpec::new(m, spec.n_cols(), columns).expect("scrambling keeps the shape");
    (
        scrambled,
        ScrambleState {
            m_rows: m,
            lower,
            shift,
        },
    )
}

#[inline]
fn mat_vec(rows: &[u64], col: u64, m: u32) -> u64 {
    rows.iter().enumerate().fold(0u64, |acc, (idx, &row)| {
        acc | (((row & col).count_ones() as u64 & 1) << (m - 1 - idx as u32))
    })
}

/// Fills in independent uniform digit permutations for every dimension and digit
/// position up to `ceil(52 / log2 b)`.
pub fn halton_permute(spec: &HaltonSpec, seed: u64) -> HaltonSpec {
    let perms: Vec<DigitPermutations> = spec
        .bases()
        .iter()
        .enumerate()
        .map(|(j, &b)| {
            let mut s = Stream::new(seed, Role::HaltonPermutation, j as u64);
            (0..digit_depth(b))
                .map(|_| s.permutation(b as usize))
                .collect()
        })
        .collect();
    spec.with_permutations(perms)
        .expect("sampled permutations are bijections")
}

/// Random base-2 generating vector: `h_1 = 1`, other components uniform over
/// the odd integers below `n`.
pub fn random_lattice_spec(d: usize, n: u64, seed: u64) -> Result<LatticeSpec> {
    if n < 2 {
        return invalid(format!("need n >= 2, got {n}"));
    }
    if d == 0 {
        return invalid("dimension must be at least 1");
    }
    let odd_count = n / 2;
    let h = (0..d)
        .map(|j| {
            if j == 0 {
                1
            } else {
                2 * Stream::new(seed, Role::LatticeGenerator, j as u64).below(odd_count) + 1
            }
        })
        .collect();
    let m_max = 64 - (n - 1).leading_zeros();
    LatticeSpec::new(h, 2, m_max)
}

/// Random upper triangular generating matrices with unit diagonal.
pub fn random_digital_spec(d: usize, m_rows: u32, n_cols: u32, seed: u64) -> Result<DigitalSpec> {
    if n_cols > m_rows {
        return invalid(format!("need n_cols <= m_rows, got {n_cols} > {m_rows}"));
    }
    if d == 0 {
        return invalid("dimension must be at least 1");
    }
    let columns = (0..d)
        .map(|j| {
            let mut s = Stream::new(seed, Role::DigitalGenerator, j as u64);
            (1..=n_cols)
                .map(|c| {
                    let random = if c > 1 {
                        s.bits(c - 1) << (m_rows - c + 1)
                    } else {
                        0
                    };
                    random | (1u64 << (m_rows - c))
                })
                .collect()
        })
        .collect();
    DigitalSpec::new(m_rows, n_cols, columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqgen::{digital_points, halton_points, lattice_points, LatticeOrder};

    #[test]
    fn zero_shift_is_identity() {
        let p = PointSet::new(2, 1, vec![0.0, 0.5]).unwrap();
        assert_eq!(shift_mod1_by(&p, &[0.0]).unwrap(), p);
        assert_eq!(digital_shift_by(&p, &[0]).unwrap(), p);
    }

    #[test]
    fn shift_wraps_around() {
        let p = PointSet::new(2, 1, vec![0.0, 0.5]).unwrap();
        assert_eq!(shift_mod1_by(&p, &[0.75]).unwrap().coords(), &[0.75, 0.25]);
    }

    #[test]
    fn digital_shift_xors_digits() {
        let p = PointSet::new(1, 1, vec![0.375]).unwrap();
        let delta = unit_to_bits(0.75);
        assert_eq!(digital_shift_by(&p, &[delta]).unwrap().coords(), &[0.625]);
    }

    #[test]
    fn shifted_lattice_is_a_coset() {
        let spec = LatticeSpec::new(vec![1, 11, 5], 2, 5).unwrap();
        for m in 1..=5 {
            let n = 1usize << m;
            let p = lattice_points(&spec, n, LatticeOrder::Extensible).unwrap();
            let s = shift_mod1(&p, 99 + m as u64);
            // pairwise differences of the shifted set, rounded onto the 1/n grid, equal the lattice
            let lattice: std::collections::HashSet<Vec<u64>> = p
                .rows()
                .map(|r| r.iter().map(|v| (v * n as f64).round() as u64).collect())
                .collect();
            for a in s.rows() {
                for b in s.rows() {
                    let diff: Vec<u64> = a
                        .iter()
                        .zip(b)
                        .map(|(x, y)| {
                            let t = (x - y).rem_euclid(1.0) * n as f64;
                            (t.round() as u64) % n as u64
                        })
                        .collect();
                    assert!(lattice.contains(&diff));
                }
            }
        }
    }

    #[test]
    fn scramble_matrices_are_unit_lower_triangular() {
        let spec = crate::seqgen::sobol_spec_bundled(4).unwrap();
        let (_, state) = linear_scramble(&spec, 5);
        assert!(state.is_unit_lower_triangular());
    }

    #[test]
    fn identity_scramble_keeps_spec() {
        let spec = crate::seqgen::sobol_spec_bundled(3).unwrap();
        let m = spec.m_rows();
        let ident: Vec<u64> = (1..=m).map(|l| 1u64 << (m - l)).collect();
        for j in 0..3 {
            let cols: Vec<u64> = spec
                .columns(j)
                .iter()
                .map(|&c| mat_vec(&ident, c, m))
                .collect();
            assert_eq!(cols, spec.columns(j));
        }
    }

    #[test]
    fn halton_permutation_is_deterministic() {
        let spec = HaltonSpec::first_primes(3).unwrap();
        let a = halton_permute(&spec, 11);
        assert_eq!(a, halton_permute(&spec, 11));
        assert_ne!(a, halton_permute(&spec, 12));
        let pts = halton_points(&a, 0, 64).unwrap();
        assert_eq!(pts.n(), 64);
    }

    #[test]
    fn random_generators() {
        for seed in 0..1000 {
            let spec = random_lattice_spec(3, 8, seed).unwrap();
            assert_eq!(spec.h()[0], 1);
            assert!(spec.h().iter().all(|h| [1, 3, 5, 7].contains(h)));
        }
        let spec = random_digital_spec(3, 52, 20, 4).unwrap();
        for j in 0..3 {
            for c in 0..20usize {
                let col = spec.columns(j)[c];
                let row = c as u32 + 1;
                assert_eq!(spec.entry(j, row, c), 1);
                // nothing below the diagonal
                assert_eq!(col & ((1u64 << (52 - row)) - 1), 0);
            }
        }
        let mut seen = std::collections::HashSet::new();
        for seed in 0..100 {
            assert!(seen.insert(random_digital_spec(2, 52, 16, seed).unwrap()));
        }
        let pts = digital_points(&spec, 16).unwrap();
        assert_eq!(pts.point(0), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn compatibility() {
        let r = RandomizeSpec::new(RandomizeKind::ShiftMod1, 0);
        assert!(r.check_family(Family::Lattice).is_ok());
        assert!(r.check_family(Family::Digital).is_err());
        let r = RandomizeSpec::new(RandomizeKind::LinearScramble, 0);
        assert!(r.check_family(Family::Digital).is_ok());
        assert!(r.check_family(Family::Halton).is_err());
        assert!(RandomizeSpec::new(RandomizeKind::None, 0)
            .check_family(Family::Iid)
            .is_ok());
        assert_eq!(
            "lms".parse::<RandomizeKind>().unwrap(),
            RandomizeKind::LinearScramble
        );
        assert!("owen".parse::<RandomizeKind>().is_err());
    }
}
