//! t-values of base-2 digital nets.
//!
//! A net of `2^m` points has quality `t` when every elementary box
//! `prod_j [a_j 2^-k_j, (a_j + 1) 2^-k_j)` with `|k| = m - t` holds exactly
//! `2^t` points. For a digital net this is equivalent to the leading `k_j`
//! rows of the generating matrices (first `m` columns) being linearly
//! independent over GF(2) for every such `k`.

use crate::error::{invalid, QmcError, Result};
use crate::points::PointSet;
use crate::seqgen::vdc::unit_to_bits;
use crate::seqgen::{digital_points, DigitalSpec};

/// Largest `m` the box-counting path accepts.
pub const COUNT_MAX_M: u32 = 20;
/// Largest dimension the box-counting path accepts.
pub const COUNT_MAX_D: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TValueMethod {
    /// GF(2) rank of stacked leading rows.
    #[default]
    Rank,
    /// Count points in every elementary box.
    Count,
    /// Both, failing if they disagree.
    Both,
}

/// A box with the wrong number of points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub k: Vec<u32>,
    pub a: Vec<u64>,
    pub count: u64,
    pub fair_share: u64,
}

impl Witness {
    /// `[lo, hi)` per coordinate.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.k
            .iter()
            .zip(&self.a)
            .map(|(&k, &a)| {
                let w = 0.5f64.powi(k as i32);
                (a as f64 * w, (a + 1) as f64 * w)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TValueResult {
    pub t: u32,
    pub m: u32,
    pub d: usize,
    /// A box showing that `t - 1` fails; `None` when `t = 0`.
    pub witness: Option<Witness>,
}

/// t-value of the first `2^m` points of a digital sequence.
pub fn t_value(spec: &DigitalSpec, m: u32, method: TValueMethod) -> Result<TValueResult> {
    if m > spec.n_cols() {
        return invalid(format!(
            "m = {m} exceeds the {} available columns",
            spec.n_cols()
        ));
    }
    match method {
        TValueMethod::Rank => Ok(t_value_rank(spec, m)),
        TValueMethod::Count => {
            check_count_limits(m, spec.d())?;
            t_value_count(&digital_points(spec, 1usize << m)?, m)
        }
        TValueMethod::Both => {
            check_count_limits(m, spec.d())?;
            let rank = t_value_rank(spec, m);
            let count = t_value_count(&digital_points(spec, 1usize << m)?, m)?;
            if rank.t != count.t {
                return Err(QmcError::TValueMismatch {
                    rank: rank.t,
                    count: count.t,
                });
            }
            Ok(count)
        }
    }
}

/// t-value of a point set of `2^m` points by box counting.
pub fn t_value_from_points(points: &PointSet) -> Result<TValueResult> {
    let n = points.n();
    if n == 0 || !n.is_power_of_two() {
        return invalid(format!("a net needs a power-of-two point count, got {n}"));
    }
    let m = n.trailing_zeros();
    check_count_limits(m, points.d())?;
    t_value_count(points, m)
}

fn check_count_limits(m: u32, d: usize) -> Result<()> {
    if m > COUNT_MAX_M || d > COUNT_MAX_D {
        return invalid(format!(
            "box counting is limited to m <= {COUNT_MAX_M} and d <= {COUNT_MAX_D}, got m = {m}, d = {d}"
        ));
    }
    Ok(())
}

/// Calls `f` on every composition of `total` into `d` nonnegative parts in
/// lexicographic order, stopping early when `f` returns `false`.
fn for_each_composition(total: u32, d: usize, mut f: impl FnMut(&[u32]) -> bool) {
    fn rec(k: &mut Vec<u32>, j: usize, left: u32, f: &mut dyn FnMut(&[u32]) -> bool) -> bool {
        if j + 1 == k.len() {
            k[j] = left;
            return f(k);
        }
        for v in 0..=left {
            k[j] = v;
            if !rec(k, j + 1, left - v, f) {
                return false;
            }
        }
        true
    }
    if d == 0 {
        return;
    }
    let mut k = vec![0u32; d];
    rec(&mut k, 0, total, &mut f);
}

fn t_value_rank(spec: &DigitalSpec, m: u32) -> TValueResult {
    let d = spec.d();
    // rows[j][l] = row l + 1 of C_j on the first m columns
    let rows: Vec<Vec<u64>> = (0..d)
        .map(|j| {
            let avail = spec.m_rows().min(m);
            let mut r = spec.leading_rows(j, avail, m);
            r.resize(m as usize, 0);
            r
        })
        .collect();
    let mut failure = None;
    for t in 0..=m {
        let s = m - t;
        let mut bad = None;
        for_each_composition(s, d, |k| match dependency(&rows, k) {
            Some(dep) => {
                bad = Some((k.to_vec(), dep));
                false
            }
            None => true,
        });
        match bad {
            None => {
                let witness = failure.map(|(k, dep): (Vec<u32>, usize)| {
                    let a = empty_box(&k, dep);
                    Witness {
                        k,
                        a,
                        count: 0,
                        fair_share: 1u64 << (t - 1),
                    }
                });
                return TValueResult { t, m, d, witness };
            }
            Some(b) => failure = Some(b),
        }
    }
    unreachable!("the empty composition is always independent")
}

/// Gaussian elimination over the stacked rows selected by `k`. On dependence
/// returns the position (in stacking order) of one row taking part in a zero
/// combination.
fn dependency(rows: &[Vec<u64>], k: &[u32]) -> Option<usize> {
    // (reduced row, set of stacked positions combined into it)
    let mut basis: Vec<(u64, u128)> = Vec::new();
    let mut pos = 0usize;
    for (j, &kj) in k.iter().enumerate() {
        for &row in &rows[j][..kj as usize] {
            let mut v = row;
            let mut combo = 1u128 << pos;
            for &(b, c) in &basis {
                let pivot = 63 - b.leading_zeros();
                if v >> pivot & 1 == 1 {
                    v ^= b;
                    combo ^= c;
                }
            }
            if v == 0 {
                return Some(combo.trailing_zeros() as usize);
            }
            // keep the basis in reduced form so one pass suffices
            let pivot = 63 - v.leading_zeros();
            for (b, c) in basis.iter_mut() {
                if *b >> pivot & 1 == 1 {
                    *b ^= v;
                    *c ^= combo;
                }
            }
            basis.push((v, combo));
            pos += 1;
        }
    }
    None
}

/// A box missed by every point: if rows `R` satisfy `sum_{r in S} R_r = 0`,
/// no point has digits with odd weight on `S`, so setting one digit of `S`
/// and leaving the rest zero names an empty box.
fn empty_box(k: &[u32], pos: usize) -> Vec<u64> {
    let mut a = vec![0u64; k.len()];
    let mut p = pos;
    for (j, &kj) in k.iter().enumerate() {
        if p < kj as usize {
            // digit p + 1 of a_j counted from the most significant end
            a[j] = 1u64 << (kj as usize - 1 - p);
            break;
        }
        p -= kj as usize;
    }
    a
}

fn t_value_count(points: &PointSet, m: u32) -> Result<TValueResult> {
    let d = points.d();
    if points.n() != 1usize << m {
        return invalid(format!(
            "expected {} points, got {}",
            1usize << m,
            points.n()
        ));
    }
    let bits: Vec<u64> = points.coords().iter().map(|&x| unit_to_bits(x)).collect();
    let mut counts: Vec<u64> = Vec::new();
    let mut failure: Option<Witness> = None;
    for t in 0..=m {
        let s = m - t;
        let fair = 1u64 << t;
        let mut bad = None;
        for_each_composition(s, d, |k| {
            counts.clear();
            counts.resize(1usize << s, 0);
            for p in bits.chunks_exact(d.max(1)) {
                let mut idx = 0usize;
                for (&b, &kj) in p.iter().zip(k) {
                    if kj > 0 {
                        idx = (idx << kj) | (b >> (52 - kj)) as usize;
                    }
                }
                counts[idx] += 1;
            }
            match counts.iter().position(|&c| c != fair) {
                Some(idx) => {
                    bad = Some(Witness {
                        k: k.to_vec(),
                        a: split_index(idx, k),
                        count: counts[idx],
                        fair_share: fair,
                    });
                    false
                }
                None => true,
            }
        });
        match bad {
            None => {
                return Ok(TValueResult {
                    t,
                    m,
                    d,
                    witness: failure,
                })
            }
            Some(w) => failure = Some(w),
        }
    }
    unreachable!("a single box always holds every point")
}

fn split_index(mut idx: usize, k: &[u32]) -> Vec<u64> {
    let mut a = vec![0u64; k.len()];
    for j in (0..k.len()).rev() {
        a[j] = (idx & ((1usize << k[j]) - 1)) as u64;
        idx >>= k[j];
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqgen::digital::tests::example_net;

    #[test]
    fn example_net_has_t_one() {
        let spec = example_net();
        for method in [TValueMethod::Rank, TValueMethod::Count, TValueMethod::Both] {
            let r = t_value(&spec, 3, method).unwrap();
            assert_eq!(r.t, 1);
            assert_eq!(r.witness.as_ref().unwrap().k, vec![2, 0, 1]);
        }
        let w = t_value(&spec, 3, TValueMethod::Count)
            .unwrap()
            .witness
            .unwrap();
        assert_eq!(w.a, vec![0, 0, 0]);
        assert_eq!(w.count, 2);
        assert_eq!(w.bounds(), vec![(0.0, 0.25), (0.0, 1.0), (0.0, 0.5)]);
    }

    #[test]
    fn rank_witness_box_is_empty() {
        let spec = example_net();
        let w = t_value(&spec, 3, TValueMethod::Rank)
            .unwrap()
            .witness
            .unwrap();
        let pts = digital_points(&spec, 8).unwrap();
        let inside = pts
            .rows()
            .filter(|p| {
                p.iter()
                    .zip(w.bounds())
                    .all(|(&x, (lo, hi))| lo <= x && x < hi)
            })
            .count();
        assert_eq!(inside, 0);
    }

    #[test]
    fn projection_is_a_zero_net() {
        let spec = example_net().project(2).unwrap();
        let r = t_value(&spec, 3, TValueMethod::Both).unwrap();
        assert_eq!(r.t, 0);
        assert!(r.witness.is_none());
    }

    #[test]
    fn van_der_corput_is_a_zero_net() {
        for m in 0..=8 {
            let spec = DigitalSpec::new(52, 8, vec![DigitalSpec::identity_columns(52, 8)]).unwrap();
            assert_eq!(t_value(&spec, m, TValueMethod::Both).unwrap().t, 0);
        }
    }

    #[test]
    fn compositions_are_enumerated_once() {
        let mut seen = Vec::new();
        for_each_composition(3, 3, |k| {
            seen.push(k.to_vec());
            true
        });
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[0], vec![0, 0, 3]);
        assert!(seen.iter().all(|k| k.iter().sum::<u32>() == 3));
    }

    #[test]
    fn rejects_non_power_of_two() {
        let p = PointSet::new(3, 1, vec![0.0, 0.5, 0.25]).unwrap();
        assert!(t_value_from_points(&p).is_err());
    }
}
