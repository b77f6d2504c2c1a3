//! Keister error sweeps over sample sizes and point families.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{accumulate, keister_integrand, keister_reference, Integrand};
use crate::error::{invalid, QmcError, Result};
use crate::generator::{build_generator, grid_per_axis, SequenceSpec};
use crate::randomize::{Family, RandomizeKind, RandomizeSpec};
use crate::rng::{derive_seed, Role};
use crate::util::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkMethod {
    /// Tensor midpoint grid, deterministic.
    Grid,
    Iid,
    /// Digitally shifted Sobol'.
    Ld,
    /// Randomly shifted lattice.
    Lattice,
}

impl BenchmarkMethod {
    pub fn name(self) -> &'static str {
        match self {
            BenchmarkMethod::Grid => "grid",
            BenchmarkMethod::Iid => "iid",
            BenchmarkMethod::Ld => "ld",
            BenchmarkMethod::Lattice => "lattice",
        }
    }
}

impl fmt::Display for BenchmarkMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkMethod {
    type Err = QmcError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "grid" => BenchmarkMethod::Grid,
            "iid" => BenchmarkMethod::Iid,
            "ld" | "sobol" => BenchmarkMethod::Ld,
            "lattice" => BenchmarkMethod::Lattice,
            other => return invalid(format!("unknown benchmark method `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub d: usize,
    pub m_min: u32,
    pub m_max: u32,
    pub replications: usize,
    pub seed: u64,
    pub methods: Vec<BenchmarkMethod>,
}

impl BenchmarkConfig {
    pub fn new(d: usize, m_min: u32, m_max: u32, seed: u64) -> Self {
        BenchmarkConfig {
            d,
            m_min,
            m_max,
            replications: 50,
            seed,
            methods: vec![
                BenchmarkMethod::Grid,
                BenchmarkMethod::Iid,
                BenchmarkMethod::Ld,
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub method: BenchmarkMethod,
    pub n: u64,
    pub replication: usize,
    pub estimate: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

/// Keister estimates at `n = 2^m` for `m_min <= m <= m_max`. Each randomized
/// replication draws one stream of `2^m_max` points and reports its prefixes.
/// The grid uses the largest `k^d <= 2^m`. Rows are ordered by method, `n`,
/// replication.
pub fn keister_benchmark(config: &BenchmarkConfig) -> Result<Vec<BenchmarkRow>> {
    if config.m_min > config.m_max || config.m_max > 30 {
        return invalid(format!(
            "need m_min <= m_max <= 30, got {}..{}",
            config.m_min, config.m_max
        ));
    }
    if config.replications == 0 {
        return invalid("need at least one replication");
    }
    let d = config.d;
    let f = keister_integrand(d)?;
    let mu = keister_reference(d)?;
    let row = |method, n, replication, estimate: f64| BenchmarkRow {
        method,
        n,
        replication,
        estimate,
        abs_err: (estimate - mu).abs(),
        rel_err: ((estimate - mu) / mu).abs(),
    };
    let mut rows = Vec::new();
    for &method in &config.methods {
        match method {
            BenchmarkMethod::Grid => {
                let mut sizes: Vec<usize> = (config.m_min..=config.m_max)
                    .map(|m| grid_per_axis(1usize << m, d))
                    .collect();
                sizes.dedup();
                for k in sizes {
                    let spec = SequenceSpec::Grid { per_axis: k, d };
                    let g = build_generator(&spec, RandomizeSpec::new(RandomizeKind::None, 0))?;
                    let n = g.max_points() as u64;
                    let mut acc = NeumaierSum::default();
                    accumulate(&f, &g.points(0, n as usize)?, &mut acc, 0)?;
                    rows.push(row(method, n, 0, acc.total() / n as f64));
                }
            }
            _ => {
                let (family, kind) = match method {
                    BenchmarkMethod::Iid => (Family::Iid, RandomizeKind::None),
                    BenchmarkMethod::Ld => (Family::Digital, RandomizeKind::DigitalShift),
                    _ => (Family::Lattice, RandomizeKind::ShiftMod1),
                };
                let spec = SequenceSpec::default_for(family, d, 0)?;
                let per_rep: Vec<Vec<f64>> = (0..config.replications)
                    .into_par_iter()
                    .map(|r| {
                        let seed = derive_seed(config.seed, Role::Replication, r as u64);
                        let g = build_generator(&spec, RandomizeSpec::new(kind, seed))?;
                        prefix_means(
                            &f,
                            g.points(0, 1usize << config.m_max)?,
                            config.m_min,
                            config.m_max,
                        )
                    })
                    .collect::<Result<_>>()?;
                for (mi, m) in (config.m_min..=config.m_max).enumerate() {
                    for (r, means) in per_rep.iter().enumerate() {
                        rows.push(row(method, 1u64 << m, r, means[mi]));
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// Means over the first `2^m` points for each `m` in range.
fn prefix_means(
    f: &dyn Integrand,
    pts: crate::PointSet,
    m_min: u32,
    m_max: u32,
) -> Result<Vec<f64>> {
    let mut acc = NeumaierSum::default();
    let mut out = Vec::new();
    let mut done = 0usize;
    for m in 0..=m_max {
        let n = 1usize << m;
        let chunk = crate::PointSet::new(
            n - done,
            pts.d(),
            pts.coords()[done * pts.d()..n * pts.d()].to_vec(),
        )?;
        accumulate(f, &chunk, &mut acc, done as u64)?;
        done = n;
        if m >= m_min {
            out.push(acc.total() / n as f64);
        }
    }
    Ok(out)
}

/// Mean relative error per `n` for one method, in increasing `n`.
pub fn mean_rel_error(rows: &[BenchmarkRow], method: BenchmarkMethod) -> Vec<(u64, f64)> {
    let mut out: Vec<(u64, f64, usize)> = Vec::new();
    for r in rows.iter().filter(|r| r.method == method) {
        match out.iter_mut().find(|e| e.0 == r.n) {
            Some(e) => {
                e.1 += r.rel_err;
                e.2 += 1;
            }
            None => out.push((r.n, r.rel_err, 1)),
        }
    }
    out.into_iter().map(|(n, s, c)| (n, s / c as f64)).collect()
}
