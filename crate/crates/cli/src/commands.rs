use clap::{Args, ValueEnum};
use qmc_core::cbc::{cbc_search, CbcConfig};
use qmc_core::cubature::{
    keister_benchmark, keister_integrand, keister_reference, stop_clt_iid, stop_qmc_clt,
    BenchmarkConfig, BenchmarkMethod, FnIntegrand, IidStopConfig, Integrand, QmcStopConfig,
};
use qmc_core::discrepancy::{
    discrepancy_iid_rms, discrepancy_lattice_fast, discrepancy_naive, empty_set_discrepancy,
    t_value, ClosureCheck, DiscrepancyResult, KernelSpec, TValueMethod,
};
use qmc_core::generator::SequenceSpec;
use qmc_core::multilevel::{
    default_randomization, estimate_variation, ml_estimate, optimal_allocation, LevelStack,
};
use qmc_core::randomize::{Family, RandomizeKind};
use qmc_core::PointSet;

use crate::format::{join_ints, join_nums, num, Table};
use crate::seq::{kernel, m_range, SeqArgs};
use crate::{CliError, CliResult};

fn config<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

fn args(parts: &[&str]) -> Vec<String> {
    parts.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    #[arg(long)]
    pub n: usize,
}

pub fn generate(a: &GenerateArgs) -> CliResult<String> {
    let r = a.seq.resolve(a.n, RandomizeKind::None)?;
    let g = r.generator()?;
    // a grid of n points may not exist; emit the largest one that fits
    let count = match r.spec {
        SequenceSpec::Grid { .. } => g.max_points() as usize,
        _ => a.n,
    };
    let pts = g.points(0, count)?;
    let mut cmd = args(&["generate"]);
    cmd.extend(r.canonical());
    cmd.extend(["--n".into(), a.n.to_string()]);
    let mut t = Table::new(&cmd);
    t.row(std::iter::once("i".to_string()).chain((1..=pts.d()).map(|j| format!("x{j}"))));
    for (i, x) in pts.rows().enumerate() {
        t.row(std::iter::once(i.to_string()).chain(x.iter().map(|&v| num(v))));
    }
    Ok(t.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiscrepancyMethod {
    /// Direct double sum under the centered kernel.
    Naive,
    /// O(dn) formula for lattices; shift-averaged (filtered) kernel.
    Fast,
}

impl DiscrepancyMethod {
    fn name(self) -> &'static str {
        match self {
            DiscrepancyMethod::Naive => "naive",
            DiscrepancyMethod::Fast => "fast",
        }
    }

    fn eval(self, pts: &PointSet, k: &KernelSpec) -> CliResult<DiscrepancyResult> {
        Ok(match self {
            DiscrepancyMethod::Naive => discrepancy_naive(pts, k)?,
            DiscrepancyMethod::Fast => discrepancy_lattice_fast(pts, k, ClosureCheck::Spot)?,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct DiscrepancyArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    #[arg(long)]
    pub n: usize,
    /// `inverse` for 1/l, or one weight per coordinate; centered kernel if absent.
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long, value_enum, default_value = "naive")]
    pub method: DiscrepancyMethod,
}

fn kernel_args(weights: &Option<String>) -> Vec<String> {
    weights
        .iter()
        .flat_map(|w| ["--weights".to_string(), w.clone()])
        .collect()
}

pub fn discrepancy(a: &DiscrepancyArgs) -> CliResult<String> {
    let r = a.seq.resolve(a.n, RandomizeKind::None)?;
    let k = kernel(a.weights.as_deref(), r.d())?;
    let pts = r.generator()?.points(0, a.n)?;
    let res = a.method.eval(&pts, &k)?;
    let mut cmd = args(&["discrepancy"]);
    cmd.extend(r.canonical());
    cmd.extend(["--n".into(), a.n.to_string()]);
    cmd.extend(kernel_args(&a.weights));
    cmd.extend(["--method".into(), a.method.name().into()]);
    let mut t = Table::new(&cmd);
    t.row(["n", "d", "kernel", "method", "value", "scaled"]);
    t.row([
        res.n.to_string(),
        res.d.to_string(),
        res.kernel.to_string(),
        a.method.name().to_string(),
        num(res.value),
        res.scaled.map(num).unwrap_or_default(),
    ]);
    Ok(t.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TMethod {
    Rank,
    Count,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct TvalueArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    /// Points 0 .. 2^m are certified.
    #[arg(long)]
    pub m: u32,
    #[arg(long, value_enum, default_value = "rank")]
    pub method: TMethod,
}

pub fn tvalue(a: &TvalueArgs) -> CliResult<String> {
    if a.seq.seq != Family::Digital {
        return config("tvalue needs a digital net (--seq sobol)");
    }
    if a.seq.randomize.is_some_and(|k| k != RandomizeKind::None) {
        return config("tvalue reads generating matrices; randomizations do not change t");
    }
    let r = a.seq.resolve(1 << a.m.min(20), RandomizeKind::None)?;
    let SequenceSpec::Digital(spec) = &r.spec else {
        unreachable!("family checked above")
    };
    let (method, name) = match a.method {
        TMethod::Rank => (TValueMethod::Rank, "rank"),
        TMethod::Count => (TValueMethod::Count, "count"),
        TMethod::Both => (TValueMethod::Both, "both"),
    };
    let res = t_value(spec, a.m, method)?;
    let mut cmd = args(&["tvalue"]);
    cmd.extend(r.canonical());
    cmd.extend([
        "--m".into(),
        a.m.to_string(),
        "--method".into(),
        name.into(),
    ]);
    let mut t = Table::new(&cmd);
    t.pair("t", res.t);
    t.pair("m", res.m);
    t.pair("d", res.d);
    if let Some(w) = &res.witness {
        t.pair("witness_k", join_ints(&w.k, " "));
        t.pair("witness_a", join_ints(&w.a, " "));
        t.pair("witness_count", w.count);
        t.pair("fair_share", w.fair_share);
    }
    Ok(t.finish())
}

#[derive(Debug, Clone, Args)]
pub struct CbcArgs {
    /// Number of points, a power of two.
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub weights: Option<String>,
    /// Candidates, comma separated; odd integers below n if absent.
    #[arg(long, value_delimiter = ',')]
    pub candidates: Option<Vec<u64>>,
    /// Never reuse a value taken by an earlier component.
    #[arg(long)]
    pub exclude_previous: bool,
}

pub fn cbc(a: &CbcArgs) -> CliResult<String> {
    let mut cfg = CbcConfig::new(a.n, a.d, kernel(a.weights.as_deref(), a.d)?);
    cfg.candidates = a.candidates.clone();
    cfg.exclude_previous = a.exclude_previous;
    let res = cbc_search(&cfg)?;
    let mut cmd = args(&["cbc", "--n"]);
    cmd.extend([a.n.to_string(), "--d".into(), a.d.to_string()]);
    cmd.extend(kernel_args(&a.weights));
    if let Some(c) = &a.candidates {
        cmd.extend(["--candidates".into(), join_ints(c, ",")]);
    }
    if a.exclude_previous {
        cmd.push("--exclude-previous".into());
    }
    let mut t = Table::new(&cmd);
    t.comment(&format!("evaluations {}", res.evaluations));
    t.row(["j", "h", "fom"]);
    for (j, (h, fom)) in res.spec.h().iter().zip(&res.trace).enumerate() {
        t.row([(j + 1).to_string(), h.to_string(), num(*fom)]);
    }
    Ok(t.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuiltinIntegrand {
    /// pi^{d/2} cos(|t|) against the Gaussian weight, written over the unit cube.
    Keister,
    /// x_1 + ... + x_d.
    Linear,
}

impl BuiltinIntegrand {
    fn name(self) -> &'static str {
        match self {
            BuiltinIntegrand::Keister => "keister",
            BuiltinIntegrand::Linear => "linear",
        }
    }

    fn build(self, d: usize) -> CliResult<(Box<dyn Integrand>, Option<f64>)> {
        Ok(match self {
            BuiltinIntegrand::Keister => {
                let reference = if d <= 12 {
                    Some(keister_reference(d)?)
                } else {
                    None
                };
                (Box::new(keister_integrand(d)?), reference)
            }
            BuiltinIntegrand::Linear => (
                Box::new(FnIntegrand::new(d, "linear", |x: &[f64]| x.iter().sum())),
                Some(d as f64 / 2.0),
            ),
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    #[arg(long, value_enum, default_value = "keister")]
    pub integrand: BuiltinIntegrand,
    /// Absolute error tolerance.
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Randomized replications (low-discrepancy sequences only).
    #[arg(long, default_value_t = 15)]
    pub replications: usize,
    /// First sample size: points per replication, or the IID pilot size.
    #[arg(long)]
    pub n_init: Option<u64>,
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Pilot standard deviation inflation (IID only).
    #[arg(long, default_value_t = 1.2)]
    pub inflation: f64,
}

pub fn integrate(a: &IntegrateArgs) -> CliResult<String> {
    let family = a.seq.seq;
    let r = a.seq.resolve(
        a.n_init.unwrap_or(256) as usize,
        default_randomization(family),
    )?;
    let (f, reference) = a.integrand.build(r.d())?;
    let mut cmd = args(&["integrate"]);
    cmd.extend(r.canonical());
    cmd.extend([
        "--integrand".into(),
        a.integrand.name().into(),
        "--eps".into(),
        num(a.eps),
    ]);
    cmd.extend(["--alpha".into(), num(a.alpha)]);
    let res = if family == Family::Iid {
        let mut cfg = IidStopConfig::new(a.eps, a.alpha, a.seq.seed);
        cfg.n0 = a.n_init.unwrap_or(cfg.n0);
        cfg.n_max = a.n_max.unwrap_or(cfg.n_max);
        cfg.inflation = a.inflation;
        cmd.extend([
            "--n-init".into(),
            cfg.n0.to_string(),
            "--n-max".into(),
            cfg.n_max.to_string(),
        ]);
        cmd.extend(["--inflation".into(), num(cfg.inflation)]);
        stop_clt_iid(&*f, &cfg)?
    } else {
        let cfg = QmcStopConfig {
            eps: a.eps,
            alpha: a.alpha,
            replications: a.replications,
            n_init: a.n_init.unwrap_or(1 << 8),
            n_max: a.n_max.unwrap_or(1 << 20),
            sequence: r.spec.clone(),
            randomize: r.randomize.kind,
            seed: a.seq.seed,
        };
        cmd.extend(["--replications".into(), cfg.replications.to_string()]);
        cmd.extend([
            "--n-init".into(),
            cfg.n_init.to_string(),
            "--n-max".into(),
            cfg.n_max.to_string(),
        ]);
        stop_qmc_clt(&*f, &cfg)?
    };
    let mut t = Table::new(&cmd);
    t.pair("estimate", num(res.estimate));
    t.pair("half_width", num(res.half_width));
    t.pair("met_tolerance", res.met_tolerance);
    t.pair("n", res.n_per_replication);
    t.pair("replications", res.replications);
    t.pair("total_evaluations", res.total_evaluations);
    t.pair("pilot_evaluations", res.pilot_evaluations);
    if let Some(mu) = reference {
        t.pair("reference", num(mu));
        t.pair("abs_err", num((res.estimate - mu).abs()));
    }
    Ok(t.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuiltinStack {
    /// f_1 = x_1 and f_2 = x_1 + x_1 x_2 with costs 1 and 2; the mean is 3/4.
    Analytic,
}

#[derive(Debug, Clone, Args)]
pub struct MlArgs {
    #[arg(long, value_enum, default_value = "analytic")]
    pub stack: BuiltinStack,
    /// Sequence family for every level; randomized with its default.
    #[arg(long, default_value = "sobol")]
    pub seq: Family,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-level variation values; estimated by a pilot run if absent.
    #[arg(long, value_delimiter = ',')]
    pub v: Option<Vec<f64>>,
}

pub fn ml_integrate(a: &MlArgs) -> CliResult<String> {
    if !matches!(
        a.seq,
        Family::Lattice | Family::Digital | Family::Halton | Family::Iid
    ) {
        return config("ml-integrate needs an extensible sequence: lattice, sobol, halton or iid");
    }
    let BuiltinStack::Analytic = a.stack;
    let stack = LevelStack::new(
        vec![
            Box::new(FnIntegrand::new(1, "x1", |x: &[f64]| x[0])),
            Box::new(FnIntegrand::new(2, "x1+x1x2", |x: &[f64]| {
                x[0] + x[0] * x[1]
            })),
        ],
        vec![1.0, 2.0],
    )?;
    let reference = 0.75;
    let v = match &a.v {
        Some(v) if v.len() != stack.len() => {
            return config(format!("--v needs {} values", stack.len()))
        }
        Some(v) => v.clone(),
        None => estimate_variation(&stack, a.seq, a.seed)?,
    };
    let alloc = optimal_allocation(&v, stack.costs(), a.eps)?;
    let est = ml_estimate(&stack, &alloc, a.seq, a.seed)?;
    let mut cmd = args(&["ml-integrate", "--stack", "analytic", "--seq"]);
    cmd.extend([
        a.seq.to_string(),
        "--eps".into(),
        num(a.eps),
        "--seed".into(),
        a.seed.to_string(),
    ]);
    if let Some(v) = &a.v {
        cmd.extend(["--v".into(), join_nums(v, ",")]);
    }
    let mut t = Table::new(&cmd);
    t.row(["level", "d", "cost", "v", "n", "correction"]);
    for (l, (&d, &c)) in stack.dims().iter().zip(stack.costs()).enumerate() {
        t.row([
            (l + 1).to_string(),
            d.to_string(),
            num(c),
            num(v[l]),
            alloc.n[l].to_string(),
            num(est.corrections[l]),
        ]);
    }
    t.comment(&format!("estimate {}", num(est.estimate)));
    t.comment(&format!("predicted_error {}", num(alloc.predicted_error)));
    t.comment(&format!("total_cost {}", num(alloc.total_cost)));
    t.comment(&format!("continuous_cost {}", num(alloc.continuous_cost)));
    t.comment(&format!("reference {}", num(reference)));
    Ok(t.finish())
}

#[derive(Debug, Clone, Args)]
pub struct BenchKeisterArgs {
    #[arg(long, default_value_t = 6)]
    pub d: usize,
    /// Sizes n = 2^a .. 2^b.
    #[arg(long, default_value = "7:14")]
    pub m_range: String,
    /// Overrides the lower end of --m-range.
    #[arg(long)]
    pub mmin: Option<u32>,
    /// Overrides the upper end of --m-range.
    #[arg(long)]
    pub mmax: Option<u32>,
    #[arg(long, default_value_t = 50)]
    pub replications: usize,
    /// Any of grid, iid, ld, lattice.
    #[arg(long, value_delimiter = ',', default_value = "grid,iid,ld")]
    pub methods: Vec<BenchmarkMethod>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn resolve_range(text: &str, lo: Option<u32>, hi: Option<u32>) -> CliResult<(u32, u32)> {
    let (a, b) = m_range(text)?;
    let (a, b) = (lo.unwrap_or(a), hi.unwrap_or(b));
    m_range(&format!("{a}:{b}"))
}

pub fn bench_keister(a: &BenchKeisterArgs) -> CliResult<String> {
    let (m_min, m_max) = resolve_range(&a.m_range, a.mmin, a.mmax)?;
    let mut cfg = BenchmarkConfig::new(a.d, m_min, m_max, a.seed);
    cfg.replications = a.replications;
    cfg.methods = a.methods.clone();
    let rows = keister_benchmark(&cfg)?;
    let methods: Vec<String> = a.methods.iter().map(|m| m.to_string()).collect();
    let mut cmd = args(&["benchmark", "keister", "--d"]);
    cmd.extend([
        a.d.to_string(),
        "--m-range".into(),
        format!("{m_min}:{m_max}"),
    ]);
    cmd.extend([
        "--replications".into(),
        a.replications.to_string(),
        "--methods".into(),
        methods.join(","),
    ]);
    cmd.extend(["--seed".into(), a.seed.to_string()]);
    let mut t = Table::new(&cmd);
    t.row([
        "method",
        "n",
        "replication",
        "estimate",
        "abs_err",
        "rel_err",
    ]);
    for r in rows {
        t.row([
            r.method.to_string(),
            r.n.to_string(),
            r.replication.to_string(),
            num(r.estimate),
            num(r.abs_err),
            num(r.rel_err),
        ]);
    }
    Ok(t.finish())
}

#[derive(Debug, Clone, Args)]
pub struct BenchDiscrepancyArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    #[arg(long, default_value = "4:12")]
    pub m_range: String,
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long, value_enum, default_value = "naive")]
    pub method: DiscrepancyMethod,
}

pub fn bench_discrepancy(a: &BenchDiscrepancyArgs) -> CliResult<String> {
    let (m_min, m_max) = m_range(&a.m_range)?;
    let r = a.seq.resolve(1 << m_max, RandomizeKind::None)?;
    if matches!(
        r.spec,
        SequenceSpec::Grid { .. } | SequenceSpec::Hammersley { .. }
    ) {
        return config("benchmark discrepancy needs an extensible sequence");
    }
    let d = r.d();
    let k = kernel(a.weights.as_deref(), d)?;
    let g = r.generator()?;
    let all = g.points(0, 1 << m_max)?;
    let empty = empty_set_discrepancy(d, &k)?;
    let mut cmd = args(&["benchmark", "discrepancy"]);
    cmd.extend(r.canonical());
    cmd.extend(["--m-range".into(), format!("{m_min}:{m_max}")]);
    cmd.extend(kernel_args(&a.weights));
    cmd.extend(["--method".into(), a.method.name().into()]);
    let mut t = Table::new(&cmd);
    t.row(["n", "value", "scaled", "iid_rms", "iid_scaled"]);
    for m in m_min..=m_max {
        let n = 1usize << m;
        let res = a.method.eval(&all.prefix(n), &k)?;
        let iid = discrepancy_iid_rms(n, d, &k)?;
        t.row([
            n.to_string(),
            num(res.value),
            num(res.value / empty),
            num(iid),
            num(iid / empty),
        ]);
    }
    Ok(t.finish())
}
