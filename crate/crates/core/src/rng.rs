//! Seeded random streams.
//!
//! Every random quantity in this crate is drawn from a ChaCha8 stream whose
//! 256-bit key is derived from `(seed, role, index)` with the SplitMix64
//! finalizer. Because the key depends only on that triple, a shift for
//! dimension 7 of replication 3 is the same value no matter in which order
//! (or on which thread) it is requested. ChaCha8 is a counter-based cipher, so
//! any word of a stream can also be reached directly with
//! [`Stream::seek_u64`].
//!
//! Uniform doubles take the top 53 bits of a 64-bit word; bounded integers use
//! rejection on the full 64-bit word. Both are fixed here rather than borrowed
//! from `rand` so that outputs do not drift across crate versions.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// What a stream is used for. Distinct roles never share a key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Role {
    ShiftMod1 = 1,
    DigitalShift = 2,
    ScrambleMatrix = 3,
    HaltonPermutation = 4,
    LatticeGenerator = 5,
    DigitalGenerator = 6,
    Iid = 7,
    Replication = 8,
    Level = 9,
    Spot = 10,
}

#[inline]
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed, e.g. one per replication or per level.
pub fn derive_seed(seed: u64, role: Role, index: u64) -> u64 {
    splitmix64(
        splitmix64(seed ^ splitmix64(role as u64))
            ^ splitmix64(index.wrapping_add(0x632B_E59B_D9B4_E019)),
    )
}

pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64, role: Role, index: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = derive_seed(seed, role, index);
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        Stream {
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// The low `bits` bits of a fresh word.
    #[inline]
    pub fn bits(&mut self, bits: u32) -> u64 {
        let w = self.next_u64();
        if bits >= 64 {
            w
        } else {
            w & ((1u64 << bits) - 1)
        }
    }

    /// Uniform on `{0, ..., bound - 1}`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let w = self.next_u64();
            if w < zone {
                return w % bound;
            }
        }
    }

    /// Positions the stream at its `k`-th 64-bit word.
    pub fn seek_u64(&mut self, k: u64) {
        self.rng.set_word_pos(2 * k as u128);
    }

    /// Uniformly random permutation of `0..len` (Fisher-Yates, high to low).
    pub fn permutation(&mut self, len: usize) -> Vec<u32> {
        let mut p: Vec<u32> = (0..len as u32).collect();
        for i in (1..len).rev() {
            let j = self.below(i as u64 + 1) as usize;
            p.swap(i, j);
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_keyed_by_role_and_index() {
        let a = Stream::new(7, Role::DigitalShift, 0).next_u64();
        let b = Stream::new(7, Role::DigitalShift, 0).next_u64();
        let c = Stream::new(7, Role::DigitalShift, 1).next_u64();
        let e = Stream::new(7, Role::ShiftMod1, 0).next_u64();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, e);
    }

    #[test]
    fn seek_reaches_the_same_word() {
        let mut s = Stream::new(1, Role::Iid, 0);
        let words: Vec<u64> = (0..10).map(|_| s.next_u64()).collect();
        let mut t = Stream::new(1, Role::Iid, 0);
        t.seek_u64(7);
        assert_eq!(t.next_u64(), words[7]);
    }

    #[test]
    fn below_and_permutation_stay_in_range() {
        let mut s = Stream::new(3, Role::Spot, 0);
        for _ in 0..1000 {
            assert!(s.below(5) < 5);
        }
        let mut p = s.permutation(9);
        p.sort_unstable();
        assert_eq!(p, (0..9).collect::<Vec<_>>());
        let u = s.uniform();
        assert!((0.0..1.0).contains(&u));
    }
}
