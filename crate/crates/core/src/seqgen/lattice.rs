use crate::error::{invalid, QmcError, Result};
use crate::points::PointSet;

use super::vdc::MAX_INDEX;

/// Point ordering for rank-1 lattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LatticeOrder {
    /// `x_i = phi_b(i) h mod 1`; every prefix of length `b^m` is a lattice.
    #[default]
    Extensible,
    /// `x_i = i h / n mod 1` for a fixed `n`.
    Natural,
}

/// Generating vector and base of a rank-1 lattice sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSpec {
    h: Vec<u64>,
    base: u32,
    m_max: u32,
}

impl LatticeSpec {
    /// `h[0]` must be 1; with base 2 every component must be odd.
    pub fn new(h: Vec<u64>, base: u32, m_max: u32) -> Result<Self> {
        if base < 2 {
            return invalid(format!("lattice base must be at least 2, got {base}"));
        }
        if h.is_empty() {
            return invalid("generating vector is empty");
        }
        if h[0] != 1 {
            return invalid(format!(
                "first generating component must be 1, got {}",
                h[0]
            ));
        }
        if let Some(&z) = h.iter().find(|&&v| v == 0) {
            return invalid(format!("generating components must be positive, got {z}"));
        }
        if base == 2 {
            if let Some(&e) = h.iter().find(|&&v| v % 2 == 0) {
                return invalid(format!("base-2 generating components must be odd, got {e}"));
            }
        }
        match (base as u128).checked_pow(m_max) {
            Some(cap) if cap <= MAX_INDEX as u128 => {}
            _ => return invalid(format!("{base}^{m_max} exceeds 2^52")),
        }
        Ok(LatticeSpec { h, base, m_max })
    }

    /// Base-2 spec with the largest `m_max` that keeps coordinates exact.
    pub fn base2(h: Vec<u64>) -> Result<Self> {
        Self::new(h, 2, 52)
    }

    pub fn h(&self) -> &[u64] {
        &self.h
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn m_max(&self) -> u32 {
        self.m_max
    }

    pub fn d(&self) -> usize {
        self.h.len()
    }

    /// `b^m_max`, the number of distinct points.
    pub fn capacity(&self) -> u64 {
        (self.base as u64).pow(self.m_max)
    }

    /// The first `k` components.
    pub fn truncate(&self, k: usize) -> Result<LatticeSpec> {
        if k == 0 || k > self.h.len() {
            return invalid(format!(
                "cannot truncate a {}-dimensional spec to {k}",
                self.h.len()
            ));
        }
        LatticeSpec::new(self.h[..k].to_vec(), self.base, self.m_max)
    }
}

/// The first `n` points in the given order.
pub fn lattice_points(spec: &LatticeSpec, n: usize, order: LatticeOrder) -> Result<PointSet> {
    match order {
        LatticeOrder::Extensible => lattice_points_range(spec, 0, n),
        LatticeOrder::Natural => {
            if n == 0 {
                return Ok(PointSet::empty(spec.d()));
            }
            if n as u128 > spec.capacity() as u128 {
                return Err(QmcError::TooManyPoints {
                    requested: n as u128,
                    max: spec.capacity() as u128,
                });
            }
            let nn = n as u128;
            let mut coords = Vec::with_capacity(n * spec.d());
            for i in 0..nn {
                for &h in &spec.h {
                    let k = (i * h as u128) % nn;
                    coords.push(k as f64 / n as f64);
                }
            }
            Ok(PointSet::from_raw(n, spec.d(), coords))
        }
    }
}

/// Points `start .. start + count` of the extensible sequence.
pub fn lattice_points_range(spec: &LatticeSpec, start: u64, count: usize) -> Result<PointSet> {
    let cap = spec.capacity() as u128;
    let end = start as u128 + count as u128;
    if end > cap {
        return Err(QmcError::TooManyPoints {
            requested: end,
            max: cap,
        });
    }
    let b = spec.base as u128;
    let mut coords = Vec::with_capacity(count * spec.d());
    let h: Vec<u128> = spec.h.iter().map(|&v| v as u128 % cap).collect();
    for i in start..start + count as u64 {
        // phi_b(i) = r / b^m_max exactly
        let mut r: u128 = 0;
        let mut rest = i as u128;
        for _ in 0..spec.m_max {
            r = r * b + rest % b;
            rest /= b;
        }
        for &hj in &h {
            let k = (r * hj) % cap;
            coords.push(k as f64 / cap as f64);
        }
    }
    Ok(PointSet::from_raw(count, spec.d(), coords))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_spec() -> LatticeSpec {
        LatticeSpec::new(vec![1, 11], 2, 4).unwrap()
    }

    #[test]
    fn extensible_shifts_match_worked_example() {
        let p = lattice_points(&fig_spec(), 16, LatticeOrder::Extensible).unwrap();
        assert_eq!(p.point(2), &[0.25, 0.75]);
        assert_eq!(p.point(4), &[0.125, 0.375]);
        assert_eq!(p.point(8), &[0.0625, 0.6875]);
        assert_eq!(p.point(0), &[0.0, 0.0]);
    }

    #[test]
    fn natural_order_matches_direct_formula() {
        let p = lattice_points(&fig_spec(), 16, LatticeOrder::Natural).unwrap();
        assert_eq!(p.point(1), &[0.0625, 0.6875]);
    }

    #[test]
    fn orders_agree_as_sets() {
        let spec = LatticeSpec::new(vec![1, 11, 7], 2, 6).unwrap();
        for m in 0..=6 {
            let n = 1usize << m;
            let mut a: Vec<Vec<u64>> = lattice_points(&spec, n, LatticeOrder::Extensible)
                .unwrap()
                .rows()
                .map(|r| r.iter().map(|v| v.to_bits()).collect())
                .collect();
            let mut b: Vec<Vec<u64>> = lattice_points(&spec, n, LatticeOrder::Natural)
                .unwrap()
                .rows()
                .map(|r| r.iter().map(|v| v.to_bits()).collect())
                .collect();
            a.sort();
            b.sort();
            assert_eq!(a, b, "m={m}");
        }
    }

    #[test]
    fn validation() {
        assert!(LatticeSpec::new(vec![1, 4], 2, 4).is_err());
        assert!(LatticeSpec::new(vec![3, 5], 2, 4).is_err());
        assert!(LatticeSpec::new(vec![1, 4], 3, 4).is_ok());
        assert!(LatticeSpec::new(vec![1], 2, 53).is_err());
        let spec = fig_spec();
        assert!(matches!(
            lattice_points(&spec, 17, LatticeOrder::Extensible),
            Err(QmcError::TooManyPoints { .. })
        ));
    }

    #[test]
    fn base3_lattice_prefix() {
        let spec = LatticeSpec::new(vec![1, 2], 3, 3).unwrap();
        let p = lattice_points(&spec, 3, LatticeOrder::Extensible).unwrap();
        assert_eq!(p.point(1)[0], 9.0 / 27.0);
        assert_eq!(p.point(1)[1], 18.0 / 27.0);
    }
}
