use std::path::PathBuf;

use clap::Args;
use qmc_core::cbc::default_lattice;
use qmc_core::discrepancy::KernelSpec;
use qmc_core::generator::{build_generator, PointGenerator, SequenceSpec};
use qmc_core::randomize::{Family, RandomizeKind, RandomizeSpec};
use qmc_core::seqgen::{sobol_spec, sobol_spec_bundled, DigitalSpec, LatticeSpec};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Args)]
pub struct SeqArgs {
    /// lattice, sobol, halton, hammersley, grid or iid.
    #[arg(long, default_value = "sobol")]
    pub seq: Family,
    /// Dimension; implied by --h or --matrices when given.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// none, shift, digital-shift, lms or permute.
    #[arg(long)]
    pub randomize: Option<RandomizeKind>,
    /// Lattice generating vector, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub h: Option<Vec<u64>>,
    /// Generating matrices file (`d M N` header, then one line of column integers per dimension).
    #[arg(long)]
    pub matrices: Option<PathBuf>,
    /// Sobol' direction numbers file (`j s a m_1 .. m_s` lines).
    #[arg(long)]
    pub directions: Option<PathBuf>,
}

/// A resolved sequence with the randomization that will be applied to it.
pub struct Resolved {
    pub spec: SequenceSpec,
    pub randomize: RandomizeSpec,
    canonical: Vec<String>,
}

impl Resolved {
    pub fn d(&self) -> usize {
        self.spec.dim()
    }

    pub fn generator(&self) -> CliResult<Box<dyn PointGenerator>> {
        Ok(build_generator(&self.spec, self.randomize)?)
    }

    pub fn canonical(&self) -> Vec<String> {
        self.canonical.clone()
    }
}

fn config<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

impl SeqArgs {
    /// `n_hint` sizes the fixed families (grid, Hammersley); `default_randomize`
    /// applies when --randomize is absent.
    pub fn resolve(&self, n_hint: usize, default_randomize: RandomizeKind) -> CliResult<Resolved> {
        let family = self.seq;
        if self.h.is_some() && family != Family::Lattice {
            return config("--h only applies to --seq lattice");
        }
        if (self.matrices.is_some() || self.directions.is_some()) && family != Family::Digital {
            return config("--matrices and --directions only apply to --seq sobol");
        }
        if self.matrices.is_some() && self.directions.is_some() {
            return config("give either --matrices or --directions, not both");
        }
        let need_d = || {
            self.d
                .ok_or_else(|| CliError::Config("--d is required".into()))
        };
        let spec = match family {
            Family::Lattice => match &self.h {
                Some(h) => SequenceSpec::Lattice(LatticeSpec::base2(h.clone())?),
                None => SequenceSpec::Lattice(default_lattice(need_d()?)?),
            },
            Family::Digital => match (&self.matrices, &self.directions) {
                (Some(path), _) => SequenceSpec::Digital(DigitalSpec::from_file(path)?),
                (_, Some(path)) => SequenceSpec::Digital(sobol_spec(need_d()?, path)?),
                _ => SequenceSpec::Digital(sobol_spec_bundled(need_d()?)?),
            },
            _ => SequenceSpec::default_for(family, need_d()?, n_hint)?,
        };
        if let Some(d) = self.d {
            if d != spec.dim() {
                return config(format!(
                    "--d {d} does not match the {}-dimensional generator",
                    spec.dim()
                ));
            }
        }
        let kind = self.randomize.unwrap_or(default_randomize);
        let randomize = RandomizeSpec::new(kind, self.seed);
        randomize.check_family(family)?;

        let mut canonical = vec![
            "--seq".to_string(),
            family.to_string(),
            "--d".into(),
            spec.dim().to_string(),
            "--seed".into(),
            self.seed.to_string(),
            "--randomize".into(),
            kind.to_string(),
        ];
        if let Some(h) = &self.h {
            canonical.push("--h".into());
            canonical.push(crate::format::join_ints(h, ","));
        }
        for (flag, path) in [
            ("--matrices", &self.matrices),
            ("--directions", &self.directions),
        ] {
            if let Some(p) = path {
                canonical.push(flag.into());
                canonical.push(p.display().to_string());
            }
        }
        Ok(Resolved {
            spec,
            randomize,
            canonical,
        })
    }
}

/// `--weights`: absent for the centered kernel, `inverse` for `1/l`, or a
/// comma separated list with one weight per coordinate.
pub fn kernel(weights: Option<&str>, d: usize) -> CliResult<KernelSpec> {
    match weights {
        None => Ok(KernelSpec::centered()),
        Some("inverse") => Ok(KernelSpec::inverse_index(d)),
        Some(list) => {
            let w = list
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::Config(format!("weight `{t}`: {e}")))
                })
                .collect::<CliResult<Vec<f64>>>()?;
            if w.len() != d {
                return config(format!("{} weights given for dimension {d}", w.len()));
            }
            Ok(KernelSpec::weighted(w)?)
        }
    }
}

/// `a:b`, inclusive.
pub fn m_range(text: &str) -> CliResult<(u32, u32)> {
    let parsed = text
        .split_once(':')
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
    match parsed {
        Some((a, b)) if a <= b && b <= 52 => Ok((a, b)),
        _ => config(format!(
            "--m-range wants `a:b` with a <= b <= 52, got `{text}`"
        )),
    }
}
