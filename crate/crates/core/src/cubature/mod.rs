//! Sample-mean cubature: integrands, variable transformations, control
//! variates, the Keister test integral, stopping rules and benchmark sweeps.

mod benchmark;
mod keister;
mod stopping;

pub use benchmark::{
    keister_benchmark, mean_rel_error, BenchmarkConfig, BenchmarkMethod, BenchmarkRow,
};
pub use keister::{keister_integrand, keister_reference, KeisterIntegrand};
pub use stopping::{
    clt_sample_size, stop_clt_iid, stop_qmc_clt, IidStopConfig, QmcStopConfig, StopResult,
};

use crate::error::{invalid, QmcError, Result};
use crate::points::PointSet;
use crate::special::gaussian_inv_cdf;
use crate::util::NeumaierSum;

/// A function on `[0, 1)^d`. Evaluation must be deterministic.
pub trait Integrand: Sync {
    fn dim(&self) -> usize;

    fn evaluate(&self, x: &[f64]) -> Result<f64>;

    fn label(&self) -> &str {
        "integrand"
    }
}

/// An integrand backed by a closure.
pub struct FnIntegrand<F> {
    d: usize,
    label: String,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnIntegrand<F> {
    pub fn new(d: usize, label: impl Into<String>, f: F) -> Self {
        FnIntegrand {
            d,
            label: label.into(),
            f,
        }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Integrand for FnIntegrand<F> {
    fn dim(&self) -> usize {
        self.d
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok((self.f)(x))
    }

    fn label(&self) -> &str {
        &self.label
    }
}

impl<I: Integrand + ?Sized> Integrand for &I {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        (**self).evaluate(x)
    }

    fn label(&self) -> &str {
        (**self).label()
    }
}

impl<I: Integrand + ?Sized> Integrand for Box<I> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        (**self).evaluate(x)
    }

    fn label(&self) -> &str {
        (**self).label()
    }
}

fn check_dim(integrand: &dyn Integrand, points: &PointSet) -> Result<()> {
    if integrand.dim() != points.d() {
        return Err(QmcError::DimensionMismatch {
            expected: integrand.dim(),
            got: points.d(),
        });
    }
    Ok(())
}

/// Compensated sum of `f(x_i)` in index order. `offset` is added to the
/// reported index of a non-finite value.
pub(crate) fn accumulate(
    integrand: &dyn Integrand,
    points: &PointSet,
    acc: &mut NeumaierSum,
    offset: u64,
) -> Result<()> {
    check_dim(integrand, points)?;
    for (i, x) in points.rows().enumerate() {
        let y = integrand.evaluate(x)?;
        if !y.is_finite() {
            return Err(QmcError::NonFinite {
                index: offset + i as u64,
                value: y,
            });
        }
        acc.add(y);
    }
    Ok(())
}

/// `(1/n) sum_i f(x_i)`.
pub fn sample_mean(integrand: &dyn Integrand, points: &PointSet) -> Result<f64> {
    if points.n() == 0 {
        return invalid("the sample mean needs at least one point");
    }
    let mut acc = NeumaierSum::default();
    accumulate(integrand, points, &mut acc, 0)?;
    Ok(acc.total() / points.n() as f64)
}

/// Sample mean of `f - f_ctrl`. The control must integrate to zero over the
/// unit cube; that is not checked.
pub fn estimate_with_control(
    f: &dyn Integrand,
    control: &dyn Integrand,
    points: &PointSet,
) -> Result<f64> {
    if f.dim() != control.dim() {
        return Err(QmcError::DimensionMismatch {
            expected: f.dim(),
            got: control.dim(),
        });
    }
    let diff = Difference { f, g: control };
    sample_mean(&diff, points)
}

/// `f(x) - g(x)` on a common domain.
pub(crate) struct Difference<'a> {
    pub f: &'a dyn Integrand,
    pub g: &'a dyn Integrand,
}

impl Integrand for Difference<'_> {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok(self.f.evaluate(x)? - self.g.evaluate(x)?)
    }
}

/// Map `Psi` from the unit cube onto the integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformSpec {
    Identity,
    /// `Psi(x) = scale * (Phi^-1(x_1), ..., Phi^-1(x_d))`, so `Psi(X)` is
    /// Gaussian with covariance `scale^2 I` when `X` is uniform.
    GaussianInvCdf {
        scale: f64,
    },
}

/// What the transformed integrand computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `E[g(T)]` where `T = Psi(X)`.
    Expectation,
    /// `int g(t) dt` over the whole domain: `g(Psi(x))` divided by the density of `Psi(X)`.
    Lebesgue,
}

/// `g` composed with a transformation, as an integrand on the unit cube.
pub struct Transformed<G> {
    d: usize,
    spec: TransformSpec,
    target: Target,
    g: G,
}

impl<G: Fn(&[f64]) -> f64 + Sync> Transformed<G> {
    pub fn new(d: usize, spec: TransformSpec, target: Target, g: G) -> Result<Self> {
        if let TransformSpec::GaussianInvCdf { scale } = spec {
            if !(scale > 0.0 && scale.is_finite()) {
                return invalid(format!("transform scale must be positive, got {scale}"));
            }
        }
        Ok(Transformed { d, spec, target, g })
    }
}

impl<G: Fn(&[f64]) -> f64 + Sync> Integrand for Transformed<G> {
    fn dim(&self) -> usize {
        self.d
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        match self.spec {
            TransformSpec::Identity => Ok((self.g)(x)),
            TransformSpec::GaussianInvCdf { scale } => {
                let t = x
                    .iter()
                    .map(|&u| Ok(scale * gaussian_inv_cdf(u)?))
                    .collect::<Result<Vec<f64>>>()?;
                let y = (self.g)(&t);
                Ok(match self.target {
                    Target::Expectation => y,
                    Target::Lebesgue => {
                        let sq: f64 = t.iter().map(|v| v * v).sum();
                        let log_density = -0.5 * sq / (scale * scale)
                            - self.d as f64 * (scale * (2.0 * std::f64::consts::PI).sqrt()).ln();
                        y / log_density.exp()
                    }
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_mean_basics() {
        let p = PointSet::new(2, 1, vec![0.0, 0.5]).unwrap();
        let id = FnIntegrand::new(1, "x", |x: &[f64]| x[0]);
        assert_eq!(sample_mean(&id, &p).unwrap(), 0.25);
        let c = FnIntegrand::new(1, "c", |_: &[f64]| 3.0);
        assert_eq!(sample_mean(&c, &p).unwrap(), 3.0);
    }

    #[test]
    fn nan_reports_its_index() {
        let p = PointSet::new(3, 1, vec![0.1, 0.5, 0.7]).unwrap();
        let f = FnIntegrand::new(1, "f", |x: &[f64]| if x[0] == 0.5 { f64::NAN } else { 1.0 });
        let err = sample_mean(&f, &p).unwrap_err();
        assert!(matches!(err, QmcError::NonFinite { index: 1, .. }));
        assert!(err.is_numerical());
    }

    #[test]
    fn dimension_mismatch() {
        let p = PointSet::new(1, 2, vec![0.1, 0.5]).unwrap();
        let f = FnIntegrand::new(1, "f", |x: &[f64]| x[0]);
        assert!(matches!(
            sample_mean(&f, &p),
            Err(QmcError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn control_variates() {
        let p = PointSet::new(4, 1, vec![0.1, 0.3, 0.65, 0.9]).unwrap();
        let f = FnIntegrand::new(1, "x", |x: &[f64]| x[0]);
        let zero = FnIntegrand::new(1, "0", |_: &[f64]| 0.0);
        assert_eq!(
            estimate_with_control(&f, &zero, &p).unwrap(),
            sample_mean(&f, &p).unwrap()
        );
        let ctrl = FnIntegrand::new(1, "x-1/2", |x: &[f64]| x[0] - 0.5);
        assert_eq!(estimate_with_control(&f, &ctrl, &p).unwrap(), 0.5);
    }

    #[test]
    fn lebesgue_target_recovers_the_gaussian_integral() {
        // int exp(-t^2) dt = sqrt(pi) on the real line
        let g = Transformed::new(
            1,
            TransformSpec::GaussianInvCdf {
                scale: 0.5f64.sqrt(),
            },
            Target::Lebesgue,
            |t: &[f64]| (-t[0] * t[0]).exp(),
        )
        .unwrap();
        let v = g.evaluate(&[0.3]).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }
}
