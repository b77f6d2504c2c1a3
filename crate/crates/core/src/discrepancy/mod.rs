//! Kernel discrepancies of point sets and t-values of digital nets.
//!
//! For a reproducing kernel `K` the squared discrepancy of `{x_i}` is
//!
//! ```text
//! int int K  -  2/n sum_i int K(t, x_i) dt  +  1/n^2 sum_ij K(x_i, x_j)
//! ```
//!
//! [`discrepancy_naive`] evaluates this directly in `O(d n^2)`.
//! [`discrepancy_lattice_fast`] evaluates the shift-averaged version for a
//! lattice in `O(d n)`, using that the difference set of a lattice is the
//! lattice itself.

mod kernel;
mod tvalue;

pub(crate) use kernel::filtered_factor;
pub use kernel::{
    kernel_eval, CenteredKernel, DiscrepancyKernel, FilteredKernel, KernelFamily, KernelSpec,
};
pub use tvalue::{t_value, t_value_from_points, TValueMethod, TValueResult, Witness};

use rayon::prelude::*;

use crate::error::{QmcError, Result};
use crate::points::PointSet;
use crate::rng::{Role, Stream};
use crate::util::NeumaierSum;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyResult {
    /// The discrepancy itself, not its square.
    pub value: f64,
    /// `value` divided by the empty-set discrepancy.
    pub scaled: Option<f64>,
    pub n: usize,
    pub d: usize,
    pub kernel: KernelSpec,
}

impl DiscrepancyResult {
    pub fn squared(&self) -> f64 {
        self.value * self.value
    }
}

/// The three terms of the squared discrepancy, kept apart for inspection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyTerms {
    pub double_integral: f64,
    pub single_sum: f64,
    pub kernel_sum: f64,
}

impl DiscrepancyTerms {
    pub fn squared(&self) -> f64 {
        self.double_integral - self.single_sum + self.kernel_sum
    }
}

/// Squared-discrepancy terms for any kernel. The kernel double sum is split by
/// rows, each row summed in index order, and the rows combined in index order,
/// so the result does not depend on the thread count.
pub fn discrepancy_terms<K: DiscrepancyKernel>(
    points: &PointSet,
    kernel: &K,
) -> Result<DiscrepancyTerms> {
    if points.d() != kernel.dim() {
        return Err(QmcError::DimensionMismatch {
            expected: kernel.dim(),
            got: points.d(),
        });
    }
    let n = points.n();
    let double_integral = kernel.double_integral();
    if n == 0 {
        return Ok(DiscrepancyTerms {
            double_integral,
            single_sum: 0.0,
            kernel_sum: 0.0,
        });
    }
    let mut single = NeumaierSum::default();
    for p in points.rows() {
        single.add(kernel.single_integral(p));
    }
    // row i holds K(x_i, x_i) + 2 sum_{j > i} K(x_i, x_j)
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = points.point(i);
            let mut acc = NeumaierSum::default();
            for j in i + 1..n {
                acc.add(kernel.eval(xi, points.point(j)));
            }
            kernel.eval(xi, xi) + 2.0 * acc.total()
        })
        .collect();
    let mut total = NeumaierSum::default();
    for r in rows {
        total.add(r);
    }
    let nf = n as f64;
    Ok(DiscrepancyTerms {
        double_integral,
        single_sum: 2.0 * single.total() / nf,
        kernel_sum: total.total() / (nf * nf),
    })
}

/// Discrepancy under the (weighted) centered kernel by the direct `O(d n^2)` formula.
pub fn discrepancy_naive(points: &PointSet, kernel: &KernelSpec) -> Result<DiscrepancyResult> {
    let k = CenteredKernel::new(kernel, points.d())?;
    let terms = discrepancy_terms(points, &k)?;
    Ok(finish(
        terms.squared(),
        terms.double_integral,
        points,
        kernel,
    ))
}

/// Direct `O(d n^2)` discrepancy under the shift-invariant kernel `K~(t - x mod 1)`.
/// This is the reference route for [`discrepancy_lattice_fast`].
pub fn discrepancy_naive_shift_invariant(
    points: &PointSet,
    kernel: &KernelSpec,
) -> Result<DiscrepancyResult> {
    let k = FilteredKernel::new(kernel, points.d())?;
    let terms = discrepancy_terms(points, &k)?;
    Ok(finish(
        terms.squared(),
        terms.double_integral,
        points,
        kernel,
    ))
}

fn finish(sq: f64, empty_sq: f64, points: &PointSet, kernel: &KernelSpec) -> DiscrepancyResult {
    let value = sq.max(0.0).sqrt();
    DiscrepancyResult {
        value,
        scaled: Some(value / empty_sq.sqrt()),
        n: points.n(),
        d: points.d(),
        kernel: kernel.clone(),
    }
}

/// How much of the group property to verify before taking the fast path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClosureCheck {
    /// Eight random pairs.
    #[default]
    Spot,
    /// Every pair.
    Full,
}

/// Root mean squared discrepancy of a randomly shifted lattice,
/// `sqrt(1/n sum_i K~(x_i) - int K~)`, in `O(d n)`.
///
/// The point set must be a lattice: closed under addition modulo 1.
pub fn discrepancy_lattice_fast(
    points: &PointSet,
    kernel: &KernelSpec,
    check: ClosureCheck,
) -> Result<DiscrepancyResult> {
    let k = FilteredKernel::new(kernel, points.d())?;
    if points.n() == 0 {
        return invalid_lattice("empty point set");
    }
    verify_closure(points, check)?;
    let mut acc = NeumaierSum::default();
    for p in points.rows() {
        acc.add(k.filtered(p));
    }
    let sq = acc.total() / points.n() as f64 - k.integral();
    Ok(finish(sq, k.integral(), points, kernel))
}

fn invalid_lattice<T>(msg: &str) -> Result<T> {
    Err(QmcError::NotALattice(msg.to_string()))
}

/// Coordinates of an `n`-point lattice are multiples of `1/n`.
fn lattice_indices(points: &PointSet) -> Result<Vec<u64>> {
    let n = points.n() as f64;
    points
        .coords()
        .iter()
        .map(|&x| {
            let k = (x * n).round();
            if (x * n - k).abs() > 1e-6 {
                invalid_lattice(&format!("coordinate {x} is not a multiple of 1/{n}"))
            } else {
                Ok(k as u64 % points.n() as u64)
            }
        })
        .collect()
}

fn verify_closure(points: &PointSet, check: ClosureCheck) -> Result<()> {
    let n = points.n();
    let d = points.d();
    let idx = lattice_indices(points)?;
    let set: std::collections::HashSet<&[u64]> = idx.chunks_exact(d.max(1)).collect();
    if set.len() != n && d > 0 {
        return invalid_lattice("repeated points");
    }
    let sum_in_set = |i: usize, j: usize| {
        let s: Vec<u64> = (0..d)
            .map(|l| (idx[i * d + l] + idx[j * d + l]) % n as u64)
            .collect();
        set.contains(s.as_slice())
    };
    match check {
        ClosureCheck::Full => {
            for i in 0..n {
                for j in i..n {
                    if !sum_in_set(i, j) {
                        return invalid_lattice(&format!("x_{i} + x_{j} is not in the set"));
                    }
                }
            }
        }
        ClosureCheck::Spot => {
            let mut s = Stream::new(n as u64, Role::Spot, d as u64);
            for _ in 0..8 {
                let (i, j) = (s.below(n as u64) as usize, s.below(n as u64) as usize);
                if !sum_in_set(i, j) {
                    return invalid_lattice(&format!("x_{i} + x_{j} is not in the set"));
                }
            }
        }
    }
    Ok(())
}

/// Root mean squared discrepancy of `n` IID uniform points:
/// `sqrt((int K(x, x) dx - int int K) / n)`.
pub fn discrepancy_iid_rms(n: usize, d: usize, kernel: &KernelSpec) -> Result<f64> {
    if n == 0 {
        return Err(QmcError::InvalidParameter("need n >= 1".into()));
    }
    let g = kernel.gamma_sq(d)?;
    let diag: f64 = g.iter().map(|g| 1.0 + g / 4.0).product();
    let double: f64 = g.iter().map(|g| 1.0 + g / 12.0).product();
    Ok(((diag - double) / n as f64).sqrt())
}

/// Discrepancy of the empty set, `sqrt(int int K)`.
pub fn empty_set_discrepancy(d: usize, kernel: &KernelSpec) -> Result<f64> {
    let g = kernel.gamma_sq(d)?;
    Ok(g.iter().map(|g| 1.0 + g / 12.0).product::<f64>().sqrt())
}
