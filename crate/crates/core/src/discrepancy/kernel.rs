use std::fmt;

use crate::error::{invalid, QmcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Centered,
    WeightedCentered,
}

/// Kernel selector: the centered kernel, or its weighted variant with one
/// positive weight per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    weights: Vec<f64>,
}

impl KernelSpec {
    /// Unweighted centered kernel, valid in any dimension.
    pub fn centered() -> Self {
        KernelSpec {
            family: KernelFamily::Centered,
            weights: Vec::new(),
        }
    }

    pub fn weighted(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return invalid("weighted kernel needs at least one weight");
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return invalid(format!(
                "coordinate weights must be positive and finite, got {w}"
            ));
        }
        Ok(KernelSpec {
            family: KernelFamily::WeightedCentered,
            weights,
        })
    }

    /// Weights `1 / l` for `l = 1..=d`.
    pub fn inverse_index(d: usize) -> Self {
        KernelSpec {
            family: KernelFamily::WeightedCentered,
            weights: (1..=d).map(|l| 1.0 / l as f64).collect(),
        }
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Squared weights for a `d`-dimensional evaluation.
    pub fn gamma_sq(&self, d: usize) -> Result<Vec<f64>> {
        match self.family {
            KernelFamily::Centered => Ok(vec![1.0; d]),
            KernelFamily::WeightedCentered => {
                if self.weights.len() != d {
                    return Err(QmcError::DimensionMismatch {
                        expected: self.weights.len(),
                        got: d,
                    });
                }
                Ok(self.weights.iter().map(|g| g * g).collect())
            }
        }
    }

    /// Restricts a weighted kernel to its leading `d` coordinates.
    pub fn truncate(&self, d: usize) -> Result<Self> {
        match self.family {
            KernelFamily::Centered => Ok(self.clone()),
            KernelFamily::WeightedCentered => {
                if d > self.weights.len() {
                    return Err(QmcError::DimensionMismatch {
                        expected: self.weights.len(),
                        got: d,
                    });
                }
                KernelSpec::weighted(self.weights[..d].to_vec())
            }
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            KernelFamily::Centered => f.write_str("centered"),
            KernelFamily::WeightedCentered => {
                let w: Vec<String> = self.weights.iter().map(|w| format!("{w}")).collect();
                write!(f, "weighted_centered[{}]", w.join(";"))
            }
        }
    }
}

/// A reproducing kernel together with the integrals the discrepancy needs.
pub trait DiscrepancyKernel: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, t: &[f64], x: &[f64]) -> f64;
    /// `int K(t, x) dt`
    fn single_integral(&self, x: &[f64]) -> f64;
    /// `int int K(t, x) dt dx`
    fn double_integral(&self) -> f64;
}

/// `prod_l [1 + g_l^2 / 2 (|t_l - 1/2| + |x_l - 1/2| - |t_l - x_l|)]`
#[derive(Debug, Clone)]
pub struct CenteredKernel {
    gamma_sq: Vec<f64>,
}

impl CenteredKernel {
    pub fn new(spec: &KernelSpec, d: usize) -> Result<Self> {
        Ok(CenteredKernel {
            gamma_sq: spec.gamma_sq(d)?,
        })
    }
}

impl DiscrepancyKernel for CenteredKernel {
    fn dim(&self) -> usize {
        self.gamma_sq.len()
    }

    #[inline]
    fn eval(&self, t: &[f64], x: &[f64]) -> f64 {
        self.gamma_sq
            .iter()
            .zip(t.iter().zip(x))
            .map(|(g, (&a, &b))| {
                1.0 + 0.5 * g * ((a - 0.5).abs() + (b - 0.5).abs() - (a - b).abs())
            })
            .product()
    }

    #[inline]
    fn single_integral(&self, x: &[f64]) -> f64 {
        self.gamma_sq
            .iter()
            .zip(x)
            .map(|(g, &v)| {
                let c = (v - 0.5).abs();
                1.0 + 0.5 * g * (c - c * c)
            })
            .product()
    }

    fn double_integral(&self) -> f64 {
        self.gamma_sq.iter().map(|g| 1.0 + g / 12.0).product()
    }
}

/// Shift-averaged centered kernel `K~(x) = prod_l [1 + g_l^2 (1/4 - x_l (1 - x_l))]`.
#[derive(Debug, Clone)]
pub struct FilteredKernel {
    gamma_sq: Vec<f64>,
}

impl FilteredKernel {
    pub fn new(spec: &KernelSpec, d: usize) -> Result<Self> {
        Ok(FilteredKernel {
            gamma_sq: spec.gamma_sq(d)?,
        })
    }

    /// `K~(x)` for a single argument.
    #[inline]
    pub fn filtered(&self, x: &[f64]) -> f64 {
        self.gamma_sq
            .iter()
            .zip(x)
            .map(|(g, &v)| 1.0 + g * filtered_factor(v))
            .product()
    }

    pub fn integral(&self) -> f64 {
        self.gamma_sq.iter().map(|g| 1.0 + g / 12.0).product()
    }
}

/// `1/4 - x (1 - x)`
#[inline]
pub(crate) fn filtered_factor(x: f64) -> f64 {
    0.25 - x * (1.0 - x)
}

/// The shift-invariant kernel `K(t, x) = K~(t - x mod 1)`.
impl DiscrepancyKernel for FilteredKernel {
    fn dim(&self) -> usize {
        self.gamma_sq.len()
    }

    #[inline]
    fn eval(&self, t: &[f64], x: &[f64]) -> f64 {
        self.gamma_sq
            .iter()
            .zip(t.iter().zip(x))
            .map(|(g, (&a, &b))| 1.0 + g * filtered_factor((a - b).rem_euclid(1.0)))
            .product()
    }

    fn single_integral(&self, _x: &[f64]) -> f64 {
        self.integral()
    }

    fn double_integral(&self) -> f64 {
        self.integral()
    }
}

/// `K(t, x)` for the kernel named by `spec`.
pub fn kernel_eval(spec: &KernelSpec, t: &[f64], x: &[f64]) -> Result<f64> {
    if t.len() != x.len() {
        return Err(QmcError::DimensionMismatch {
            expected: t.len(),
            got: x.len(),
        });
    }
    Ok(CenteredKernel::new(spec, t.len())?.eval(t, x))
}
