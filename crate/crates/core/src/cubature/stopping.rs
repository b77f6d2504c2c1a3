//! Stopping rules that pick the sample size from the data.

use rayon::prelude::*;

use super::{accumulate, Integrand};
use crate::error::{invalid, Result};
use crate::generator::{build_generator, PointGenerator, SequenceSpec};
use crate::randomize::{RandomizeKind, RandomizeSpec};
use crate::rng::{derive_seed, Role};
use crate::special::{gaussian_inv_cdf, student_t_quantile};
use crate::util::NeumaierSum;

#[derive(Debug, Clone, PartialEq)]
pub struct StopResult {
    pub estimate: f64,
    pub half_width: f64,
    pub n_per_replication: u64,
    pub replications: usize,
    /// Integrand evaluations behind `estimate`, equal to `n_per_replication * replications`.
    pub total_evaluations: u64,
    /// Evaluations spent on a discarded pilot sample.
    pub pilot_evaluations: u64,
    /// False when `n_max` cut the run short of the tolerance.
    pub met_tolerance: bool,
    pub eps: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IidStopConfig {
    pub eps: f64,
    pub alpha: f64,
    pub n0: u64,
    /// Factor applied to the pilot standard deviation.
    pub inflation: f64,
    pub n_max: u64,
    pub seed: u64,
}

impl IidStopConfig {
    pub fn new(eps: f64, alpha: f64, seed: u64) -> Self {
        IidStopConfig {
            eps,
            alpha,
            n0: 1024,
            inflation: 1.2,
            n_max: 1 << 30,
            seed,
        }
    }
}

fn check_tolerances(eps: f64, alpha: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return invalid(format!("tolerance must be positive, got {eps}"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}

/// Two-stage IID rule: a pilot of `n0` points estimates the standard
/// deviation `S`, then `n = ceil((2 Z inflation S / eps)^2)` fresh points give
/// the estimate. The pilot is not reused.
///
/// `half_width` is `eps` when the tolerance is met, else the tolerance that
/// the capped `n` satisfies.
pub fn stop_clt_iid(integrand: &dyn Integrand, config: &IidStopConfig) -> Result<StopResult> {
    check_tolerances(config.eps, config.alpha)?;
    if config.n0 < 2 {
        return invalid(format!("the pilot needs n0 >= 2, got {}", config.n0));
    }
    if config.inflation.is_nan() || config.inflation < 1.0 {
        return invalid(format!(
            "inflation must be at least 1, got {}",
            config.inflation
        ));
    }
    let d = integrand.dim();
    let pilot = build_generator(&SequenceSpec::Iid { d }, iid(config.seed, 0))?
        .points(0, config.n0 as usize)?;
    let mut values = Vec::with_capacity(pilot.n());
    for (i, x) in pilot.rows().enumerate() {
        let y = integrand.evaluate(x)?;
        if !y.is_finite() {
            return Err(crate::QmcError::NonFinite {
                index: i as u64,
                value: y,
            });
        }
        values.push(y);
    }
    let s = sample_std(&values);
    let z = gaussian_inv_cdf(1.0 - config.alpha / 2.0)?;
    let scaled = 2.0 * z * config.inflation * s;
    let wanted = clt_sample_size(s, config.eps, config.alpha, config.inflation)?;
    let (n, met) = if s == 0.0 {
        (config.n0, true)
    } else if wanted > config.n_max as f64 {
        (config.n_max, false)
    } else {
        (wanted.max(1.0) as u64, true)
    };
    let pts =
        build_generator(&SequenceSpec::Iid { d }, iid(config.seed, 1))?.points(0, n as usize)?;
    let mut acc = NeumaierSum::default();
    accumulate(integrand, &pts, &mut acc, 0)?;
    Ok(StopResult {
        estimate: acc.total() / n as f64,
        half_width: if met {
            if s == 0.0 {
                0.0
            } else {
                config.eps
            }
        } else {
            scaled / (n as f64).sqrt()
        },
        n_per_replication: n,
        replications: 1,
        total_evaluations: n,
        pilot_evaluations: config.n0,
        met_tolerance: met,
        eps: config.eps,
        alpha: config.alpha,
    })
}

/// `ceil((2 Z^{1 - alpha/2} inflation s / eps)^2)` as a float, so callers can
/// compare against a cap before converting.
pub fn clt_sample_size(s: f64, eps: f64, alpha: f64, inflation: f64) -> Result<f64> {
    check_tolerances(eps, alpha)?;
    let z = gaussian_inv_cdf(1.0 - alpha / 2.0)?;
    Ok((2.0 * z * inflation * s / eps).powi(2).ceil())
}

fn iid(seed: u64, stage: u64) -> RandomizeSpec {
    RandomizeSpec::new(
        RandomizeKind::None,
        derive_seed(seed, Role::Replication, stage),
    )
}

fn sample_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().copied().collect::<NeumaierSum>().total() / n;
    let ss = values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .collect::<NeumaierSum>()
        .total();
    (ss / (n - 1.0)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct QmcStopConfig {
    pub eps: f64,
    pub alpha: f64,
    pub replications: usize,
    pub n_init: u64,
    pub n_max: u64,
    pub sequence: SequenceSpec,
    pub randomize: RandomizeKind,
    pub seed: u64,
}

impl QmcStopConfig {
    /// Fifteen digitally shifted Sobol' replications starting from 2^8 points.
    pub fn sobol(d: usize, eps: f64, alpha: f64, seed: u64) -> Result<Self> {
        Ok(QmcStopConfig {
            eps,
            alpha,
            replications: 15,
            n_init: 1 << 8,
            n_max: 1 << 20,
            sequence: SequenceSpec::Digital(crate::seqgen::sobol_spec_bundled(d)?),
            randomize: RandomizeKind::DigitalShift,
            seed,
        })
    }
}

struct Replication {
    generator: Box<dyn PointGenerator>,
    sum: NeumaierSum,
    evaluated: u64,
}

/// Replicated randomized rule: `R` independent randomizations of one
/// extensible sequence; `n` doubles until the Student-t half-width
/// `t_{R-1} S / sqrt R` of the replication means drops to `eps`. Each
/// doubling evaluates only the new points.
pub fn stop_qmc_clt(integrand: &dyn Integrand, config: &QmcStopConfig) -> Result<StopResult> {
    check_tolerances(config.eps, config.alpha)?;
    let r = config.replications;
    if r < 2 {
        return invalid(format!("need at least 2 replications, got {r}"));
    }
    if config.n_init == 0 || !config.n_init.is_power_of_two() {
        return invalid(format!(
            "n_init must be a power of two, got {}",
            config.n_init
        ));
    }
    if config.n_max < config.n_init {
        return invalid("n_max must be at least n_init");
    }
    if config.sequence.dim() != integrand.dim() {
        return Err(crate::QmcError::DimensionMismatch {
            expected: integrand.dim(),
            got: config.sequence.dim(),
        });
    }
    let t = student_t_quantile(1.0 - config.alpha / 2.0, (r - 1) as f64)?;
    let mut reps = (0..r as u64)
        .map(|k| {
            let seed = derive_seed(config.seed, Role::Replication, k);
            let generator =
                build_generator(&config.sequence, RandomizeSpec::new(config.randomize, seed))?;
            Ok(Replication {
                generator,
                sum: NeumaierSum::default(),
                evaluated: 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut n = config.n_init;
    loop {
        if n as u128 > reps[0].generator.max_points() {
            return invalid(format!("the sequence cannot supply {n} points"));
        }
        reps.par_iter_mut().try_for_each(|rep| -> Result<()> {
            let start = rep.evaluated;
            let pts = rep.generator.points(start, (n - start) as usize)?;
            accumulate(integrand, &pts, &mut rep.sum, start)?;
            rep.evaluated = n;
            Ok(())
        })?;
        let means: Vec<f64> = reps.iter().map(|rep| rep.sum.total() / n as f64).collect();
        let estimate = means.iter().copied().collect::<NeumaierSum>().total() / r as f64;
        let half_width = t * sample_std(&means) / (r as f64).sqrt();
        let met = half_width <= config.eps;
        if met || 2 * n > config.n_max {
            let total = reps.iter().map(|rep| rep.evaluated).sum();
            return Ok(StopResult {
                estimate,
                half_width,
                n_per_replication: n,
                replications: r,
                total_evaluations: total,
                pilot_evaluations: 0,
                met_tolerance: met,
                eps: config.eps,
                alpha: config.alpha,
            });
        }
        n *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubature::FnIntegrand;

    #[test]
    fn constant_integrands_stop_immediately() {
        let f = FnIntegrand::new(2, "c", |_: &[f64]| 4.0);
        let r = stop_clt_iid(&f, &IidStopConfig::new(0.01, 0.05, 1)).unwrap();
        assert_eq!(r.n_per_replication, 1024);
        assert_eq!(r.estimate, 4.0);
        assert_eq!(r.half_width, 0.0);

        let q = stop_qmc_clt(&f, &QmcStopConfig::sobol(2, 1e-6, 0.05, 1).unwrap()).unwrap();
        assert_eq!(q.n_per_replication, 256);
        assert_eq!(q.half_width, 0.0);
        assert_eq!(q.estimate, 4.0);
    }

    #[test]
    fn iid_sample_size_formula() {
        // f(x) = x has standard deviation 1/sqrt(12)
        let f = FnIntegrand::new(1, "x", |x: &[f64]| x[0]);
        let mut cfg = IidStopConfig::new(0.01, 0.05, 3);
        cfg.inflation = 1.0;
        cfg.n0 = 1 << 14;
        let r = stop_clt_iid(&f, &cfg).unwrap();
        let expected = (2.0 * 1.959964 / 12f64.sqrt() / 0.01).powi(2);
        assert!((r.n_per_replication as f64 / expected - 1.0).abs() < 0.05);
        assert!(r.met_tolerance);
        assert_eq!(r.total_evaluations, r.n_per_replication);
    }

    #[test]
    fn sample_size_example() {
        assert_eq!(clt_sample_size(1.0, 0.01, 0.05, 1.0).unwrap(), 153_659.0);
        // with the quantile rounded to 1.96 the same formula gives 153,664
        assert_eq!((2.0f64 * 1.96 / 0.01).powi(2).round(), 153_664.0);
    }

    #[test]
    fn iid_cap_is_flagged() {
        let f = FnIntegrand::new(1, "x", |x: &[f64]| x[0]);
        let mut cfg = IidStopConfig::new(1e-5, 0.05, 3);
        cfg.n_max = 5000;
        let r = stop_clt_iid(&f, &cfg).unwrap();
        assert!(!r.met_tolerance);
        assert_eq!(r.n_per_replication, 5000);
        assert!(r.half_width > cfg.eps);
    }

    #[test]
    fn qmc_reuses_evaluations() {
        let f = FnIntegrand::new(3, "prod", |x: &[f64]| x.iter().product::<f64>() * 8.0);
        let cfg = QmcStopConfig::sobol(3, 1e-5, 0.05, 5).unwrap();
        let r = stop_qmc_clt(&f, &cfg).unwrap();
        assert!(r.n_per_replication > cfg.n_init);
        assert_eq!(r.total_evaluations, r.n_per_replication * 15);
        assert!((r.estimate - 1.0).abs() < 1e-4);
    }

    #[test]
    fn bad_configs() {
        let f = FnIntegrand::new(1, "x", |x: &[f64]| x[0]);
        assert!(stop_clt_iid(&f, &IidStopConfig::new(0.0, 0.05, 1)).is_err());
        assert!(stop_clt_iid(&f, &IidStopConfig::new(0.1, 1.0, 1)).is_err());
        let mut cfg = QmcStopConfig::sobol(1, 0.01, 0.05, 1).unwrap();
        cfg.replications = 1;
        assert!(stop_qmc_clt(&f, &cfg).is_err());
        cfg.replications = 4;
        cfg.n_init = 100;
        assert!(stop_qmc_clt(&f, &cfg).is_err());
    }
}
