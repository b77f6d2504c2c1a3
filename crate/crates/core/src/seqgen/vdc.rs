use crate::error::{invalid, QmcError, Result};

/// Indices must stay below this bound so that no digit is lost.
pub const MAX_INDEX: u64 = 1 << 52;

/// Bits of precision carried by binary coordinates.
pub const PRECISION_BITS: u32 = 52;

const UNIT: f64 = 1.0 / (1u64 << PRECISION_BITS) as f64;

/// Radical inverse `phi_b(i)`: the base-`b` digits of `i` mirrored about the radix point.
pub fn van_der_corput(i: u64, b: u32) -> Result<f64> {
    if b < 2 {
        return invalid(format!("base must be at least 2, got {b}"));
    }
    if i >= MAX_INDEX {
        return Err(QmcError::IndexOutOfRange(i));
    }
    Ok(radical_inverse(i, b))
}

/// Unchecked radical inverse. `b >= 2` and `i < 2^52` are the caller's job.
#[inline]
pub(crate) fn radical_inverse(i: u64, b: u32) -> f64 {
    if b == 2 {
        // exact: at most 52 significant bits
        return i.reverse_bits() as f64 * (1.0 / 18_446_744_073_709_551_616.0);
    }
    let (num, den) = radical_inverse_ratio(i, b);
    ratio_to_unit(num, den)
}

/// `phi_b(i) = num / den` with `den = b^k`, `k` the digit count of `i`.
pub(crate) fn radical_inverse_ratio(mut i: u64, b: u32) -> (u128, u128) {
    let b = b as u128;
    let mut num: u128 = 0;
    let mut den: u128 = 1;
    while i > 0 {
        let digit = i as u128 % b;
        i /= b as u64;
        num = num * b + digit;
        den *= b;
    }
    (num, den)
}

/// `num / den` correctly rounded into `[0, 1)`.
#[inline]
pub(crate) fn ratio_to_unit(num: u128, den: u128) -> f64 {
    debug_assert!(num < den);
    let v = if den <= 1u128 << 53 {
        // both operands exact, so the division rounds once
        num as f64 / den as f64
    } else {
        long_divide(num, den)
    };
    if v >= 1.0 {
        1.0 - f64::EPSILON / 2.0
    } else {
        v
    }
}

/// Binary long division keeping 64 significant quotient bits and a sticky bit,
/// so the final conversion to `f64` rounds correctly.
fn long_divide(num: u128, den: u128) -> f64 {
    if num == 0 {
        return 0.0;
    }
    debug_assert!(den < 1u128 << 126);
    let mut r = num;
    let mut skipped = 0i32;
    while r << 1 < den {
        r <<= 1;
        skipped += 1;
    }
    let mut q: u64 = 0;
    for _ in 0..64 {
        r <<= 1;
        q <<= 1;
        if r >= den {
            r -= den;
            q |= 1;
        }
    }
    if r != 0 {
        q |= 1;
    }
    q as f64 * 2f64.powi(-64 - skipped)
}

/// The 52-bit binary expansion of `x`, truncated.
#[inline]
pub fn unit_to_bits(x: f64) -> u64 {
    (x * (1u64 << PRECISION_BITS) as f64) as u64
}

#[inline]
pub fn bits_to_unit(bits: u64) -> f64 {
    bits as f64 * UNIT
}

/// Digitwise addition modulo 2 of two binary fractions.
pub fn xor_unit(a: f64, b: f64) -> f64 {
    bits_to_unit(unit_to_bits(a) ^ unit_to_bits(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_examples() {
        assert_eq!(van_der_corput(6, 2).unwrap(), 0.375);
        assert_eq!(van_der_corput(0, 7).unwrap(), 0.0);
        assert!((van_der_corput(5, 3).unwrap() - 7.0 / 9.0).abs() < 1e-16);
        assert_eq!(van_der_corput(1, 3).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn rejects_bad_base_and_large_index() {
        assert!(van_der_corput(3, 1).is_err());
        assert!(matches!(
            van_der_corput(MAX_INDEX, 2),
            Err(QmcError::IndexOutOfRange(_))
        ));
        assert!(van_der_corput(MAX_INDEX - 1, 2).unwrap() < 1.0);
    }

    #[test]
    fn xor_of_binary_fractions() {
        assert_eq!(xor_unit(0.375, 0.75), 0.625);
        assert_eq!(xor_unit(0.625, 0.625), 0.0);
    }

    #[test]
    fn prefixes_are_evenly_spaced() {
        for b in [2u32, 3, 5] {
            for m in 0..=8u32 {
                let n = (b as u64).pow(m);
                if n > 50_000 {
                    continue;
                }
                let mut got: Vec<u64> = (0..n)
                    .map(|i| {
                        let (num, den) = radical_inverse_ratio(i, b);
                        // rescale to denominator b^m
                        num * (n as u128 / den) as u64 as u128
                    })
                    .map(|v| v as u64)
                    .collect();
                got.sort_unstable();
                assert_eq!(got, (0..n).collect::<Vec<_>>(), "b={b} m={m}");
                // floating point values match k / b^m
                for i in 0..n {
                    let v = radical_inverse(i, b);
                    let k = (v * n as f64).round();
                    assert!((v - k / n as f64).abs() < 1e-15);
                }
            }
        }
    }
}
