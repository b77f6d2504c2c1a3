//! Component-by-component search for rank-1 lattice generating vectors.
//!
//! Component `j` is chosen to minimize the root mean squared shift
//! discrepancy of the `j`-dimensional lattice with components `1..j`
//! already fixed. Keeping the running product
//! `p_i = prod_{l < j} K~_l(x_il)` makes each candidate cost `O(n)`.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::cubature::{sample_mean, Integrand};
use crate::discrepancy::KernelSpec;
use crate::error::{invalid, Result};
use crate::randomize::{random_lattice_spec, shift_mod1_by, shift_vector};
use crate::rng::{derive_seed, Role};
use crate::seqgen::{lattice_points, LatticeOrder, LatticeSpec};
use crate::util::NeumaierSum;

#[derive(Debug, Clone, PartialEq)]
pub struct CbcConfig {
    /// Number of points, a power of two.
    pub n: u64,
    pub d: usize,
    /// Weighted kernels need at least `d` weights.
    pub kernel: KernelSpec,
    /// Admissible components; `None` means the odd integers in `[1, n - 1]`.
    pub candidates: Option<Vec<u64>>,
    /// Skip values already used by earlier components.
    pub exclude_previous: bool,
}

impl CbcConfig {
    pub fn new(n: u64, d: usize, kernel: KernelSpec) -> Self {
        CbcConfig {
            n,
            d,
            kernel,
            candidates: None,
            exclude_previous: false,
        }
    }

    pub fn candidate_set(&self) -> Vec<u64> {
        match &self.candidates {
            Some(c) => c.clone(),
            None => (1..self.n).step_by(2).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CbcResult {
    pub spec: LatticeSpec,
    /// Minimized figure of merit after each component.
    pub trace: Vec<f64>,
    /// Candidate evaluations performed.
    pub evaluations: u64,
}

/// Greedy search; ties go to the smallest candidate.
pub fn cbc_search(config: &CbcConfig) -> Result<CbcResult> {
    let n = config.n;
    if n < 2 || !n.is_power_of_two() {
        return invalid(format!("CBC needs n to be a power of two >= 2, got {n}"));
    }
    if config.d == 0 {
        return invalid("dimension must be at least 1");
    }
    let candidates = config.candidate_set();
    if candidates.is_empty() {
        return invalid("the candidate set is empty");
    }
    if let Some(c) = candidates.iter().find(|&&c| c == 0 || c >= n) {
        return invalid(format!("candidate {c} lies outside [1, n - 1]"));
    }
    let gamma_sq = config.kernel.truncate(config.d)?.gamma_sq(config.d)?;
    let nn = n as usize;
    let omega: Vec<f64> = (0..nn)
        .map(|k| crate::discrepancy::filtered_factor(k as f64 / n as f64))
        .collect();

    let mut h = vec![1u64];
    let mut prod: Vec<f64> = (0..nn).map(|i| 1.0 + gamma_sq[0] * omega[i]).collect();
    let mut integral = 1.0 + gamma_sq[0] / 12.0;
    let mut trace = vec![fom(&prod, integral)];
    let mut evaluations = 0u64;

    for &g in &gamma_sq[1..] {
        let integral_j = integral * (1.0 + g / 12.0);
        let pool: Vec<u64> = candidates
            .iter()
            .copied()
            .filter(|c| !(config.exclude_previous && h.contains(c)))
            .collect();
        if pool.is_empty() {
            return invalid("no candidates left after excluding earlier components");
        }
        evaluations += pool.len() as u64;
        let (best_fom, best) = pool
            .par_iter()
            .map(|&z| {
                let mut acc = NeumaierSum::default();
                let mut k = 0usize;
                for p in &prod {
                    acc.add(p * (1.0 + g * omega[k]));
                    k = (k + z as usize) & (nn - 1);
                }
                (fom_from_mean(acc.total() / n as f64, integral_j), z)
            })
            .reduce_with(|a, b| if lex_less(b, a) { b } else { a })
            .expect("pool is non-empty");
        let mut k = 0usize;
        for p in prod.iter_mut() {
            *p *= 1.0 + g * omega[k];
            k = (k + best as usize) & (nn - 1);
        }
        integral = integral_j;
        h.push(best);
        trace.push(best_fom);
    }
    let spec = LatticeSpec::new(h, 2, n.trailing_zeros())?;
    Ok(CbcResult {
        spec,
        trace,
        evaluations,
    })
}

fn lex_less(a: (f64, u64), b: (f64, u64)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

fn fom(prod: &[f64], integral: f64) -> f64 {
    let s: NeumaierSum = prod.iter().copied().collect();
    fom_from_mean(s.total() / prod.len() as f64, integral)
}

fn fom_from_mean(mean: f64, integral: f64) -> f64 {
    (mean - integral).max(0.0).sqrt()
}

/// Figure of merit of a given generating vector, computed the same way as
/// inside [`cbc_search`].
pub fn lattice_fom(h: &[u64], n: u64, kernel: &KernelSpec) -> Result<f64> {
    if n < 2 || !n.is_power_of_two() {
        return invalid(format!("n must be a power of two >= 2, got {n}"));
    }
    let gamma_sq = kernel.truncate(h.len())?.gamma_sq(h.len())?;
    let nn = n as usize;
    let mut prod = vec![1.0; nn];
    for (&hj, g) in h.iter().zip(&gamma_sq) {
        let mut k = 0usize;
        for p in prod.iter_mut() {
            *p *= 1.0 + g * crate::discrepancy::filtered_factor(k as f64 / n as f64);
            k = (k + hj as usize) & (nn - 1);
        }
    }
    Ok(fom(
        &prod,
        gamma_sq.iter().map(|g| 1.0 + g / 12.0).product(),
    ))
}

/// Bundled generating vector, one component per line, found by [`cbc_search`]
/// with `n = 2^15`, `d = 64` and weights `1 / l`.
const DEFAULT_GENERATOR: &str = include_str!("../data/lattice_generator.txt");

fn default_generator() -> &'static [u64] {
    static H: OnceLock<Vec<u64>> = OnceLock::new();
    H.get_or_init(|| {
        DEFAULT_GENERATOR
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| l.parse().expect("bundled generator holds integers"))
            .collect()
    })
}

/// The bundled generating vector truncated to `d` components.
pub fn default_lattice(d: usize) -> Result<LatticeSpec> {
    let h = default_generator();
    if d == 0 || d > h.len() {
        return invalid(format!(
            "the bundled lattice covers dimensions 1..={}, got {d}",
            h.len()
        ));
    }
    LatticeSpec::base2(h[..d].to_vec())
}

pub fn default_lattice_max_dimension() -> usize {
    default_generator().len()
}

/// Sample means from `r` independent random generating vectors, each with its
/// own random shift.
pub fn random_generator_estimates(
    integrand: &dyn Integrand,
    n: u64,
    r: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let d = integrand.dim();
    (0..r as u64)
        .map(|k| {
            let spec = random_lattice_spec(d, n, derive_seed(seed, Role::LatticeGenerator, k))?;
            let pts = lattice_points(&spec, n as usize, LatticeOrder::Extensible)?;
            let shifted = shift_mod1_by(
                &pts,
                &shift_vector(derive_seed(seed, Role::ShiftMod1, k), d),
            )?;
            sample_mean(integrand, &shifted)
        })
        .collect()
}

/// Median of `r` estimates from [`random_generator_estimates`]. `r` must be odd.
pub fn median_of_random_generators(
    integrand: &dyn Integrand,
    n: u64,
    r: usize,
    seed: u64,
) -> Result<f64> {
    if r.is_multiple_of(2) {
        return invalid(format!("the number of generators must be odd, got {r}"));
    }
    let mut estimates = random_generator_estimates(integrand, n, r, seed)?;
    estimates.sort_by(f64::total_cmp);
    Ok(estimates[r / 2])
}
