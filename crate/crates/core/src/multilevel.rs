//! Multilevel estimator `sum_l mean_i [f_l(x_i) - f_{l-1}(x_i)]` over a stack
//! of increasingly expensive approximations, with the sample allocation that
//! minimizes cost for a target error bound `sum_l V_l / n_l`.

use crate::cubature::Integrand;
use crate::error::{invalid, QmcError, Result};
use crate::generator::{build_generator, SequenceSpec};
use crate::points::PointSet;
use crate::randomize::{Family, RandomizeKind, RandomizeSpec};
use crate::rng::{derive_seed, Role};
use crate::util::NeumaierSum;

/// Levels `f_1, ..., f_L` on strictly increasing dimensions. Level `l - 1`
/// sees the first `d_{l-1}` coordinates of the points drawn for level `l`.
pub struct LevelStack {
    levels: Vec<Box<dyn Integrand>>,
    costs: Vec<f64>,
}

impl LevelStack {
    pub fn new(levels: Vec<Box<dyn Integrand>>, costs: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return invalid("a level stack needs at least one level");
        }
        if levels.len() != costs.len() {
            return invalid(format!("{} levels but {} costs", levels.len(), costs.len()));
        }
        if levels.windows(2).any(|w| w[0].dim() >= w[1].dim()) {
            return invalid("level dimensions must increase strictly");
        }
        if let Some(c) = costs.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return invalid(format!("level costs must be positive, got {c}"));
        }
        Ok(LevelStack { levels, costs })
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(|f| f.dim()).collect()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// Mean of `f_l - f_{l-1}` over `points` (dimension `d_l`), with `f_0 = 0`.
    pub fn correction_mean(&self, l: usize, points: &PointSet) -> Result<f64> {
        let fine = &*self.levels[l];
        if points.d() != fine.dim() {
            return Err(QmcError::DimensionMismatch {
                expected: fine.dim(),
                got: points.d(),
            });
        }
        if points.n() == 0 {
            return invalid("a level needs at least one point");
        }
        let coarse = (l > 0).then(|| &*self.levels[l - 1]);
        let mut acc = NeumaierSum::default();
        for (i, x) in points.rows().enumerate() {
            let mut y = fine.evaluate(x)?;
            if let Some(c) = coarse {
                y -= c.evaluate(&x[..c.dim()])?;
            }
            if !y.is_finite() {
                return Err(QmcError::NonFinite {
                    index: i as u64,
                    value: y,
                });
            }
            acc.add(y);
        }
        Ok(acc.total() / points.n() as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub n: Vec<u64>,
    /// `sum_l n_l C_l`.
    pub total_cost: f64,
    /// `(sum_l sqrt(V_l C_l))^2 / eps`, the cost before rounding up.
    pub continuous_cost: f64,
    /// `sum_l V_l / n_l` after rounding.
    pub predicted_error: f64,
}

/// `n_l = ceil(sqrt(V_l) sum_k sqrt(V_k C_k) / (eps sqrt(C_l)))`.
pub fn optimal_allocation(v: &[f64], c: &[f64], eps: f64) -> Result<Allocation> {
    if v.is_empty() || v.len() != c.len() {
        return invalid("need one variation and one cost per level");
    }
    if v.iter().chain(c).any(|x| !(*x > 0.0 && x.is_finite())) {
        return invalid("variations and costs must be positive");
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return invalid(format!("tolerance must be positive, got {eps}"));
    }
    let s: f64 = v.iter().zip(c).map(|(v, c)| (v * c).sqrt()).sum();
    let n: Vec<u64> = v
        .iter()
        .zip(c)
        .map(|(v, c)| (v.sqrt() * s / (eps * c.sqrt())).ceil() as u64)
        .collect();
    let total_cost = n.iter().zip(c).map(|(&n, c)| n as f64 * c).sum();
    let predicted_error = v.iter().zip(&n).map(|(v, &n)| v / n as f64).sum();
    debug_assert!(predicted_error <= eps * (1.0 + 1e-12));
    Ok(Allocation {
        n,
        total_cost,
        continuous_cost: s * s / eps,
        predicted_error,
    })
}

/// The randomization paired with a family for independent level estimates.
pub fn default_randomization(family: Family) -> RandomizeKind {
    match family {
        Family::Lattice => RandomizeKind::ShiftMod1,
        Family::Digital => RandomizeKind::DigitalShift,
        Family::Halton => RandomizeKind::HaltonPermute,
        _ => RandomizeKind::None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlEstimate {
    pub estimate: f64,
    pub corrections: Vec<f64>,
}

/// Sum of the level corrections, each from `n_l` points of an independently
/// randomized sequence of dimension `d_l`.
pub fn ml_estimate(
    stack: &LevelStack,
    allocation: &Allocation,
    family: Family,
    seed: u64,
) -> Result<MlEstimate> {
    if allocation.n.len() != stack.len() {
        return invalid(format!(
            "{} levels but {} sample counts",
            stack.len(),
            allocation.n.len()
        ));
    }
    if allocation.n.contains(&0) {
        return invalid("every level needs at least one point");
    }
    let corrections = (0..stack.len())
        .map(|l| {
            let pts = level_points(
                stack,
                l,
                allocation.n[l] as usize,
                family,
                derive_seed(seed, Role::Level, l as u64),
            )?;
            stack.correction_mean(l, &pts)
        })
        .collect::<Result<Vec<f64>>>()?;
    let estimate = corrections.iter().copied().collect::<NeumaierSum>().total();
    Ok(MlEstimate {
        estimate,
        corrections,
    })
}

fn level_points(
    stack: &LevelStack,
    l: usize,
    n: usize,
    family: Family,
    seed: u64,
) -> Result<PointSet> {
    let d = stack.levels[l].dim();
    let spec = SequenceSpec::default_for(family, d, n)?;
    let g = build_generator(
        &spec,
        RandomizeSpec::new(default_randomization(family), seed),
    )?;
    g.points(0, n)
}

/// Pilot size per sub-replication when estimating `V_l`.
pub const PILOT_POINTS: usize = 64;
/// Sub-replications when estimating `V_l`.
pub const PILOT_REPLICATIONS: usize = 8;

/// Heuristic `V_l`: `n` times the half-range of the level-`l` correction means
/// over independent randomizations of `n = 64` points.
pub fn estimate_variation(stack: &LevelStack, family: Family, seed: u64) -> Result<Vec<f64>> {
    (0..stack.len())
        .map(|l| {
            let means = (0..PILOT_REPLICATIONS as u64)
                .map(|k| {
                    let s = derive_seed(
                        derive_seed(seed, Role::Level, l as u64),
                        Role::Replication,
                        k,
                    );
                    stack.correction_mean(l, &level_points(stack, l, PILOT_POINTS, family, s)?)
                })
                .collect::<Result<Vec<f64>>>()?;
            let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok((PILOT_POINTS as f64 * (hi - lo) / 2.0).max(f64::MIN_POSITIVE))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostRegime {
    /// `r > d_1`: the bound stays finite as `L` grows.
    Favorable,
    /// `r < d_1`: the bound grows like `(d_1 / r)^L`.
    Unfavorable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostReport {
    pub bound: f64,
    pub regime: CostRegime,
}

/// Cost bound `(sum_{l=1}^L sqrt(V_l C_l))^2 / eps` under `C_l <= alpha d_1^l` and
/// `V_l <= beta r^-l`, which is `alpha beta q^2 (1 - q^L)^2 / (eps (1 - q)^2)` with
/// `q = sqrt(d_1 / r)`.
pub fn cost_regime_report(
    d1: f64,
    r: f64,
    alpha: f64,
    beta: f64,
    levels: u32,
    eps: f64,
) -> Result<CostReport> {
    if [d1, r, alpha, beta, eps]
        .iter()
        .any(|x| !(*x > 0.0 && x.is_finite()))
    {
        return invalid("all parameters must be positive");
    }
    if levels == 0 {
        return invalid("need at least one level");
    }
    if r == d1 {
        return invalid("the bound is singular when r equals d_1");
    }
    let q = (d1 / r).sqrt();
    let geometric = q * (1.0 - q.powi(levels as i32)) / (1.0 - q);
    Ok(CostReport {
        bound: alpha * beta * geometric * geometric / eps,
        regime: if r > d1 {
            CostRegime::Favorable
        } else {
            CostRegime::Unfavorable
        },
    })
}
