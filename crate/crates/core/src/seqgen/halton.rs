use crate::error::{invalid, Result};
use crate::points::PointSet;

use super::vdc::{radical_inverse, ratio_to_unit, MAX_INDEX};
use crate::error::QmcError;

/// Per-digit permutation tables for one dimension: `table[r]` permutes digit `r`.
pub type DigitPermutations = Vec<Vec<u32>>;

/// Bases (and optional digit permutations) of a Halton sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaltonSpec {
    bases: Vec<u32>,
    permutations: Option<Vec<DigitPermutations>>,
}

impl HaltonSpec {
    pub fn new(bases: Vec<u32>, permutations: Option<Vec<DigitPermutations>>) -> Result<Self> {
        if bases.is_empty() {
            return invalid("a Halton spec needs at least one base");
        }
        for (k, &b) in bases.iter().enumerate() {
            if !is_prime(b) {
                return invalid(format!("base {b} is not prime"));
            }
            if bases[..k].contains(&b) {
                return invalid(format!("base {b} appears twice"));
            }
        }
        if let Some(perms) = &permutations {
            if perms.len() != bases.len() {
                return invalid(format!(
                    "{} permutation sets for {} bases",
                    perms.len(),
                    bases.len()
                ));
            }
            for (tables, &b) in perms.iter().zip(&bases) {
                for sigma in tables {
                    if !is_bijection(sigma, b) {
                        return invalid(format!("{sigma:?} is not a permutation of 0..{b}"));
                    }
                }
            }
        }
        Ok(HaltonSpec {
            bases,
            permutations,
        })
    }

    /// The first `d` primes as bases, no permutations.
    pub fn first_primes(d: usize) -> Result<Self> {
        if d == 0 {
            return invalid("dimension must be at least 1");
        }
        Self::new(first_primes(d), None)
    }

    pub fn d(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }

    pub fn permutations(&self) -> Option<&[DigitPermutations]> {
        self.permutations.as_deref()
    }

    pub fn with_permutations(&self, perms: Vec<DigitPermutations>) -> Result<Self> {
        Self::new(self.bases.clone(), Some(perms))
    }
}

/// Number of base-`b` digits carried by permuted coordinates: `ceil(52 / log2 b)`.
pub fn digit_depth(b: u32) -> usize {
    let mut depth = 0;
    let mut reach: u128 = 1;
    while reach < MAX_INDEX as u128 {
        reach *= b as u128;
        depth += 1;
    }
    depth
}

pub fn first_primes(d: usize) -> Vec<u32> {
    (2u32..).filter(|&p| is_prime(p)).take(d).collect()
}

fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..)
            .take_while(|k: &u32| k * k <= p)
            .all(|k| !p.is_multiple_of(k))
}

fn is_bijection(sigma: &[u32], b: u32) -> bool {
    let mut seen = vec![false; b as usize];
    sigma.len() == b as usize
        && sigma
            .iter()
            .all(|&s| (s as usize) < seen.len() && !std::mem::replace(&mut seen[s as usize], true))
}

/// Generalized radical inverse: digit `r` of `i` passes through `tables[r]`
/// (identity beyond the table).
fn permuted_radical_inverse(i: u64, b: u32, tables: &[Vec<u32>]) -> f64 {
    let bb = b as u128;
    let mut num: u128 = 0;
    let mut den: u128 = 1;
    let mut rest = i;
    let mut r = 0;
    while rest > 0 || r < tables.len() {
        let digit = (rest % b as u64) as u32;
        rest /= b as u64;
        let mapped = tables.get(r).map_or(digit, |t| t[digit as usize]);
        num = num * bb + mapped as u128;
        den *= bb;
        r += 1;
    }
    ratio_to_unit(num, den)
}

/// Points `i_start .. i_start + n` of the (generalized) Halton sequence.
pub fn halton_points(spec: &HaltonSpec, i_start: u64, n: usize) -> Result<PointSet> {
    let end = i_start as u128 + n as u128;
    if end > MAX_INDEX as u128 {
        return Err(QmcError::IndexOutOfRange(end as u64));
    }
    let mut coords = Vec::with_capacity(n * spec.d());
    for i in i_start..i_start + n as u64 {
        for (j, &b) in spec.bases.iter().enumerate() {
            let x = match &spec.permutations {
                Some(p) => permuted_radical_inverse(i, b, &p[j]),
                None => radical_inverse(i, b),
            };
            coords.push(x);
        }
    }
    Ok(PointSet::from_raw(n, spec.d(), coords))
}

/// `(i / n, phi_b1(i), ..., phi_bd(i))` for `i < n`; dimension `d + 1`.
pub fn hammersley_points(spec: &HaltonSpec, n: usize) -> Result<PointSet> {
    if n == 0 {
        return invalid("a Hammersley set needs n >= 1");
    }
    let tail = halton_points(spec, 0, n)?;
    let d = spec.d() + 1;
    let mut coords = Vec::with_capacity(n * d);
    for (i, row) in tail.rows().enumerate() {
        coords.push(i as f64 / n as f64);
        coords.extend_from_slice(row);
    }
    Ok(PointSet::from_raw(n, d, coords))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_examples() {
        let spec = HaltonSpec::first_primes(2).unwrap();
        let p = halton_points(&spec, 0, 2).unwrap();
        assert_eq!(p.point(0), &[0.0, 0.0]);
        assert_eq!(p.point(1), &[0.5, 1.0 / 3.0]);
        let one = HaltonSpec::new(vec![2], None).unwrap();
        assert_eq!(halton_points(&one, 6, 1).unwrap().point(0), &[0.375]);
    }

    #[test]
    fn hammersley_examples() {
        let spec = HaltonSpec::new(vec![2], None).unwrap();
        let p = hammersley_points(&spec, 4).unwrap();
        assert_eq!(p.point(3), &[0.75, 0.75]);
        assert_eq!(p.column(0), vec![0.0, 0.25, 0.5, 0.75]);
        let spec = HaltonSpec::first_primes(2).unwrap();
        assert_eq!(
            hammersley_points(&spec, 2).unwrap().point(0),
            &[0.0, 0.0, 0.0]
        );
        assert!(hammersley_points(&spec, 0).is_err());
    }

    #[test]
    fn identity_permutations_change_nothing() {
        let spec = HaltonSpec::first_primes(3).unwrap();
        let ident: Vec<DigitPermutations> = spec
            .bases()
            .iter()
            .map(|&b| vec![(0..b).collect(); digit_depth(b)])
            .collect();
        let perm = spec.with_permutations(ident).unwrap();
        assert_eq!(
            halton_points(&spec, 0, 200).unwrap(),
            halton_points(&perm, 0, 200).unwrap()
        );
    }

    #[test]
    fn swapping_the_leading_digit() {
        // sigma_0 swaps 0 and 1, later digits identity: phi(1) -> 0
        let spec = HaltonSpec::new(vec![2], Some(vec![vec![vec![1, 0]]])).unwrap();
        let p = halton_points(&spec, 1, 1).unwrap();
        assert_eq!(p.point(0), &[0.0]);
        assert_eq!(halton_points(&spec, 0, 1).unwrap().point(0), &[0.5]);
    }

    #[test]
    fn validation() {
        assert!(HaltonSpec::new(vec![2, 2], None).is_err());
        assert!(HaltonSpec::new(vec![4], None).is_err());
        assert!(HaltonSpec::new(vec![3], Some(vec![vec![vec![0, 0, 1]]])).is_err());
        assert_eq!(first_primes(5), vec![2, 3, 5, 7, 11]);
        assert_eq!(digit_depth(2), 52);
        assert_eq!(digit_depth(3), 33);
    }
}
