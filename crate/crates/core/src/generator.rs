//! One interface over every sequence family and its randomization, so that
//! cubature and benchmarks can draw points `start .. start + count` from any
//! of them.

use crate::error::{invalid, QmcError, Result};
use crate::points::PointSet;
use crate::randomize::{
    digital_shift_vector, halton_permute, linear_scramble, shift_mod1_by, shift_vector, Family,
    RandomizeKind, RandomizeSpec,
};
use crate::rng::{Role, Stream};
use crate::seqgen::halton::hammersley_points;
use crate::seqgen::vdc::{bits_to_unit, PRECISION_BITS};
use crate::seqgen::{
    digital_bits_range, halton_points, lattice_points_range, sobol_spec_bundled, DigitalSpec,
    HaltonSpec, LatticeSpec,
};

/// A deterministic source of points in `[0, 1)^d`. Drawing `0..n` then
/// `n..n'` gives the same points as drawing `0..n'`.
pub trait PointGenerator: Send + Sync {
    fn dim(&self) -> usize;

    /// Number of points available.
    fn max_points(&self) -> u128;

    fn points(&self, start: u64, count: usize) -> Result<PointSet>;
}

/// Which sequence to draw from, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceSpec {
    Lattice(LatticeSpec),
    Digital(DigitalSpec),
    Halton(HaltonSpec),
    /// A Hammersley set of exactly `n` points, dimension `spec.d() + 1`.
    Hammersley {
        spec: HaltonSpec,
        n: usize,
    },
    /// Tensor midpoint grid with `per_axis^d` points.
    Grid {
        per_axis: usize,
        d: usize,
    },
    Iid {
        d: usize,
    },
}

impl SequenceSpec {
    /// The default sequence of a family: the bundled lattice generating vector,
    /// bundled Sobol' matrices, or Halton on the first `d` primes. `n_hint` is
    /// only used by the fixed-size families (Hammersley, grid).
    pub fn default_for(family: Family, d: usize, n_hint: usize) -> Result<Self> {
        if d == 0 {
            return invalid("dimension must be at least 1");
        }
        Ok(match family {
            Family::Lattice => SequenceSpec::Lattice(crate::cbc::default_lattice(d)?),
            Family::Digital => SequenceSpec::Digital(sobol_spec_bundled(d)?),
            Family::Halton => SequenceSpec::Halton(HaltonSpec::first_primes(d)?),
            Family::Hammersley => {
                if d < 2 {
                    return invalid("a Hammersley set needs d >= 2");
                }
                SequenceSpec::Hammersley {
                    spec: HaltonSpec::first_primes(d - 1)?,
                    n: n_hint,
                }
            }
            Family::Grid => SequenceSpec::Grid {
                per_axis: grid_per_axis(n_hint, d),
                d,
            },
            Family::Iid => SequenceSpec::Iid { d },
        })
    }

    pub fn family(&self) -> Family {
        match self {
            SequenceSpec::Lattice(_) => Family::Lattice,
            SequenceSpec::Digital(_) => Family::Digital,
            SequenceSpec::Halton(_) => Family::Halton,
            SequenceSpec::Hammersley { .. } => Family::Hammersley,
            SequenceSpec::Grid { .. } => Family::Grid,
            SequenceSpec::Iid { .. } => Family::Iid,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SequenceSpec::Lattice(s) => s.d(),
            SequenceSpec::Digital(s) => s.d(),
            SequenceSpec::Halton(s) => s.d(),
            SequenceSpec::Hammersley { spec, .. } => spec.d() + 1,
            SequenceSpec::Grid { d, .. } | SequenceSpec::Iid { d } => *d,
        }
    }
}

/// Largest `m` with `m^d <= n`, at least 1.
pub fn grid_per_axis(n: usize, d: usize) -> usize {
    let mut m = (n as f64).powf(1.0 / d as f64).round() as usize + 1;
    while m > 1 && (m as f64).powi(d as i32) > n as f64 {
        m -= 1;
    }
    m.max(1)
}

/// Builds the generator for `spec` under `randomize`. The randomization must
/// suit the family; IID points always use the seed.
pub fn build_generator(
    spec: &SequenceSpec,
    randomize: RandomizeSpec,
) -> Result<Box<dyn PointGenerator>> {
    randomize.check_family(spec.family())?;
    let seed = randomize.seed;
    Ok(match (spec, randomize.kind) {
        (SequenceSpec::Lattice(s), kind) => Box::new(LatticeGenerator {
            spec: s.clone(),
            shift: (kind == RandomizeKind::ShiftMod1).then(|| shift_vector(seed, s.d())),
        }),
        (SequenceSpec::Digital(s), RandomizeKind::LinearScramble) => {
            let (scrambled, state) = linear_scramble(s, seed);
            let shift = state
                .shift()
                .iter()
                .map(|&v| v << (PRECISION_BITS - s.m_rows()))
                .collect();
            Box::new(DigitalGenerator {
                spec: scrambled,
                shift,
            })
        }
        (SequenceSpec::Digital(s), kind) => Box::new(DigitalGenerator {
            spec: s.clone(),
            shift: if kind == RandomizeKind::DigitalShift {
                digital_shift_vector(seed, s.d())
            } else {
                vec![0; s.d()]
            },
        }),
        (SequenceSpec::Halton(s), RandomizeKind::HaltonPermute) => Box::new(HaltonGenerator {
            spec: halton_permute(s, seed),
        }),
        (SequenceSpec::Halton(s), _) => Box::new(HaltonGenerator { spec: s.clone() }),
        (SequenceSpec::Hammersley { spec, n }, _) => Box::new(FixedGenerator {
            points: hammersley_points(spec, *n)?,
        }),
        (SequenceSpec::Grid { per_axis, d }, _) => Box::new(GridGenerator::new(*per_axis, *d)?),
        (SequenceSpec::Iid { d }, _) => Box::new(IidGenerator { d: *d, seed }),
    })
}

struct LatticeGenerator {
    spec: LatticeSpec,
    shift: Option<Vec<f64>>,
}

impl PointGenerator for LatticeGenerator {
    fn dim(&self) -> usize {
        self.spec.d()
    }

    fn max_points(&self) -> u128 {
        self.spec.capacity() as u128
    }

    fn points(&self, start: u64, count: usize) -> Result<PointSet> {
        let p = lattice_points_range(&self.spec, start, count)?;
        match &self.shift {
            Some(s) => shift_mod1_by(&p, s),
            None => Ok(p),
        }
    }
}

struct DigitalGenerator {
    spec: DigitalSpec,
    /// 52-bit shift per dimension; zero when unshifted.
    shift: Vec<u64>,
}

impl PointGenerator for DigitalGenerator {
    fn dim(&self) -> usize {
        self.spec.d()
    }

    fn max_points(&self) -> u128 {
        self.spec.capacity()
    }

    fn points(&self, start: u64, count: usize) -> Result<PointSet> {
        let bits = digital_bits_range(&self.spec, start, count)?;
        let align = PRECISION_BITS - self.spec.m_rows();
        let d = self.spec.d();
        let coords = bits
            .iter()
            .enumerate()
            .map(|(k, &b)| bits_to_unit((b << align) ^ self.shift[k % d]))
            .collect();
        Ok(PointSet::from_raw(count, d, coords))
    }
}

struct HaltonGenerator {
    spec: HaltonSpec,
}

impl PointGenerator for HaltonGenerator {
    fn dim(&self) -> usize {
        self.spec.d()
    }

    fn max_points(&self) -> u128 {
        crate::seqgen::vdc::MAX_INDEX as u128
    }

    fn points(&self, start: u64, count: usize) -> Result<PointSet> {
        halton_points(&self.spec, start, count)
    }
}

/// A precomputed point set, served by index.
struct FixedGenerator {
    points: PointSet,
}

impl PointGenerator for FixedGenerator {
    fn dim(&self) -> usize {
        self.points.d()
    }

    fn max_points(&self) -> u128 {
        self.points.n() as u128
    }

    fn points(&self, start: u64, count: usize) -> Result<PointSet> {
        slice_points(&self.points, start, count)
    }
}

fn slice_points(points: &PointSet, start: u64, count: usize) -> Result<PointSet> {
    let end = start as u128 + count as u128;
    if end > points.n() as u128 {
        return Err(QmcError::TooManyPoints {
            requested: end,
            max: points.n() as u128,
        });
    }
    let d = points.d();
    let s = start as usize * d;
    Ok(PointSet::from_raw(
        count,
        d,
        points.coords()[s..s + count * d].to_vec(),
    ))
}

/// Tensor midpoint rule `{(2k + 1) / (2m)}^d`, first axis varying slowest.
struct GridGenerator {
    per_axis: usize,
    d: usize,
    total: u128,
}

impl GridGenerator {
    fn new(per_axis: usize, d: usize) -> Result<Self> {
        if per_axis == 0 || d == 0 {
            return invalid("a grid needs at least one point per axis and one dimension");
        }
        let total = (per_axis as u128)
            .checked_pow(d as u32)
            .unwrap_or(u128::MAX);
        Ok(GridGenerator { per_axis, d, total })
    }
}

impl PointGenerator for GridGenerator {
    fn dim(&self) -> usize {
        self.d
    }

    fn max_points(&self) -> u128 {
        self.total
    }

    fn points(&self, start: u64, count: usize) -> Result<PointSet> {
        let end = start as u128 + count as u128;
        if end > self.total {
            return Err(QmcError::TooManyPoints {
                requested: end,
                max: self.total,
            });
        }
        let m = self.per_axis as u128;
        let mut coords = vec![0.0; count * self.d];
        for (k, row) in coords.chunks_exact_mut(self.d).enumerate() {
            let mut i = start as u128 + k as u128;
            for x in row.iter_mut().rev() {
                let digit = i % m;
                i /= m;
                *x = (2 * digit + 1) as f64 / (2 * m) as f64;
            }
        }
        Ok(PointSet::from_raw(count, self.d, coords))
    }
}

/// IID uniform points; coordinate `j` of point `i` is word `i d + j` of one stream.
struct IidGenerator {
    d: usize,
    seed: u64,
}

impl PointGenerator for IidGenerator {
    fn dim(&self) -> usize {
        self.d
    }

    fn max_points(&self) -> u128 {
        u64::MAX as u128 / self.d as u128
    }

    fn points(&self, start: u64, count: usize) -> Result<PointSet> {
        let mut s = Stream::new(self.seed, Role::Iid, 0);
        s.seek_u64(start * self.d as u64);
        let coords = (0..count * self.d).map(|_| s.uniform()).collect();
        Ok(PointSet::from_raw(count, self.d, coords))
    }
}
