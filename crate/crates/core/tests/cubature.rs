use qmc_core::cbc::{cbc_search, lattice_fom, random_generator_estimates, CbcConfig};
use qmc_core::cubature::{
    estimate_with_control, keister_integrand, keister_reference, sample_mean, FnIntegrand,
    Integrand, Target, TransformSpec, Transformed,
};
use qmc_core::discrepancy::KernelSpec;
use qmc_core::generator::{build_generator, SequenceSpec};
use qmc_core::multilevel::optimal_allocation;
use qmc_core::randomize::{Family, RandomizeKind, RandomizeSpec};
use qmc_core::rng::{derive_seed, Role};
use qmc_core::special::{erf, gaussian_inv_cdf, normal_cdf, student_t_quantile};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

fn sobol(d: usize, seed: u64) -> Box<dyn qmc_core::generator::PointGenerator> {
    build_generator(
        &SequenceSpec::default_for(Family::Digital, d, 0).unwrap(),
        RandomizeSpec::new(RandomizeKind::DigitalShift, seed),
    )
    .unwrap()
}

fn iid(d: usize, seed: u64) -> Box<dyn qmc_core::generator::PointGenerator> {
    build_generator(
        &SequenceSpec::Iid { d },
        RandomizeSpec::new(RandomizeKind::None, seed),
    )
    .unwrap()
}

fn variance(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}

#[test]
fn normal_quantile_against_independent_implementations() {
    let normal = Normal::standard();
    for k in 1..1000 {
        let u = k as f64 / 1000.0;
        let x = gaussian_inv_cdf(u).unwrap();
        // statrs is good to about 1e-10 here
        assert!((normal.cdf(x) - u).abs() < 1e-10, "u = {u}");
        assert!((normal.inverse_cdf(u) - x).abs() < 1e-9, "u = {u}");
    }
    // bisection on the error function alone
    let (mut lo, mut hi) = (0.0f64, 5.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 0.5 * (1.0 + erf(mid / 2f64.sqrt())) < 0.975 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((gaussian_inv_cdf(0.975).unwrap() - lo).abs() < 1e-12);
    assert!((gaussian_inv_cdf(0.975).unwrap() - 1.959964).abs() < 1e-6);
    assert!((erf(0.7) - 0.6778011938374184).abs() < 2e-16);
    assert!((statrs::function::erf::erf(0.7) - erf(0.7)).abs() < 1e-10);
    assert!(
        (normal_cdf(-3.0) / 0.0013498980316300933 - 1.0).abs() < 1e-14,
        "{}",
        normal_cdf(-3.0)
    );
}

#[test]
fn student_quantile_against_statrs() {
    for nu in [1.0, 2.0, 5.0, 14.0, 30.0] {
        let t = StudentsT::new(0.0, 1.0, nu).unwrap();
        for p in [0.6, 0.9, 0.975, 0.995] {
            let mine = student_t_quantile(p, nu).unwrap();
            assert!((t.cdf(mine) - p).abs() < 1e-10, "nu = {nu}, p = {p}");
        }
    }
    assert!((student_t_quantile(0.975, 14.0).unwrap() - 2.1448).abs() < 1e-4);
}

#[test]
fn gaussian_transform_expectation() {
    // E exp(-T^2) for T ~ N(0, 1/2) is 1/sqrt 2
    let g = Transformed::new(
        1,
        TransformSpec::GaussianInvCdf {
            scale: 0.5f64.sqrt(),
        },
        Target::Expectation,
        |t: &[f64]| (-t[0] * t[0]).exp(),
    )
    .unwrap();
    let est = sample_mean(&g, &sobol(1, 3).points(0, 1 << 14).unwrap()).unwrap();
    assert!((est - 0.5f64.sqrt()).abs() < 1e-4, "{est}");
}

#[test]
fn keister_through_the_lebesgue_transform() {
    let g = Transformed::new(
        3,
        TransformSpec::GaussianInvCdf {
            scale: 0.5f64.sqrt(),
        },
        Target::Lebesgue,
        |t: &[f64]| {
            let r2: f64 = t.iter().map(|v| v * v).sum();
            r2.sqrt().cos() * (-r2).exp()
        },
    )
    .unwrap();
    let f = keister_integrand(3).unwrap();
    for x in [[0.1, 0.5, 0.9], [0.3, 0.3, 0.7], [0.02, 0.6, 0.45]] {
        let a = g.evaluate(&x).unwrap();
        let b = f.evaluate(&x).unwrap();
        assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
    }
}

#[test]
fn randomized_estimates_are_unbiased() {
    let f = FnIntegrand::new(2, "x1x2", |x: &[f64]| x[0] * x[1]);
    let est: Vec<f64> = (0..2000)
        .map(|s| sample_mean(&f, &sobol(2, s).points(0, 16).unwrap()).unwrap())
        .collect();
    let mean = est.iter().sum::<f64>() / est.len() as f64;
    let se = (variance(&est) / est.len() as f64).sqrt();
    assert!((mean - 0.25).abs() < 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn control_variate_reduces_variance() {
    let f = FnIntegrand::new(1, "x^2", |x: &[f64]| x[0] * x[0]);
    let ctrl = FnIntegrand::new(1, "x-1/2", |x: &[f64]| x[0] - 0.5);
    let mut wins = 0;
    for trial in 0..50u64 {
        let mut plain = Vec::new();
        let mut controlled = Vec::new();
        for r in 0..20u64 {
            let pts = iid(1, derive_seed(trial, Role::Replication, r))
                .points(0, 64)
                .unwrap();
            plain.push(sample_mean(&f, &pts).unwrap());
            controlled.push(estimate_with_control(&f, &ctrl, &pts).unwrap());
        }
        if variance(&controlled) < variance(&plain) {
            wins += 1;
        }
    }
    assert!(wins >= 45, "{wins} of 50");
}

#[test]
fn keister_reference_matches_randomized_qmc() {
    let f = keister_integrand(6).unwrap();
    let est: Vec<f64> = (0..16)
        .map(|s| sample_mean(&f, &sobol(6, s).points(0, 1 << 15).unwrap()).unwrap())
        .collect();
    let mean = est.iter().sum::<f64>() / est.len() as f64;
    let se = (variance(&est) / est.len() as f64).sqrt();
    assert!(
        (mean - keister_reference(6).unwrap()).abs() < 3.0 * se,
        "mean {mean}, se {se}"
    );
}

#[test]
fn median_of_generators_beats_a_single_generator() {
    let f = keister_integrand(6).unwrap();
    let mu = keister_reference(6).unwrap();
    let (mut wins, mut beats_mean) = (0, 0);
    for trial in 0..50u64 {
        let mut est = random_generator_estimates(&f, 1 << 10, 11, trial).unwrap();
        let single = est.iter().map(|e| (e - mu).abs()).sum::<f64>() / 11.0;
        let mean = est.iter().sum::<f64>() / 11.0;
        est.sort_by(f64::total_cmp);
        let median = (est[5] - mu).abs();
        wins += (median <= single) as u32;
        beats_mean += (median <= (mean - mu).abs()) as u32;
    }
    println!("median vs mean of the same 11 estimates: {beats_mean} of 50");
    assert!(wins >= 30, "median won {wins} of 50");
}

#[test]
fn cbc_against_the_exhaustive_two_dimensional_optimum() {
    let k = KernelSpec::centered();
    let r = cbc_search(&CbcConfig::new(16, 2, k.clone())).unwrap();
    let best = (1..16u64)
        .step_by(2)
        .map(|z| lattice_fom(&[1, z], 16, &k).unwrap())
        .fold(f64::INFINITY, f64::min);
    // with h_1 fixed at 1 the greedy step is the exhaustive search
    assert_eq!(r.trace[1], best);
    let mut global = f64::INFINITY;
    for a in (1..16u64).step_by(2) {
        for b in (1..16u64).step_by(2) {
            global = global.min(lattice_fom(&[a, b], 16, &k).unwrap());
        }
    }
    let ratio = r.trace[1] / global;
    println!("cbc / exhaustive FOM ratio at n = 16, d = 2: {ratio}");
    assert!(ratio >= 1.0 - 1e-12);
}

#[test]
fn allocation_is_near_optimal_for_its_budget() {
    let v = [1.0, 0.25];
    let c = [1.0, 2.0];
    let a = optimal_allocation(&v, &c, 0.01).unwrap();
    let budget = a.total_cost;
    let mut best = f64::INFINITY;
    for n1 in 1..=budget as u64 {
        let n2 = ((budget - n1 as f64) / c[1]).floor() as u64;
        if n2 >= 1 {
            best = best.min(v[0] / n1 as f64 + v[1] / n2 as f64);
        }
    }
    // one discretization step: the error change from moving one sample
    let step = v[0] / a.n[0] as f64 - v[0] / (a.n[0] + 1) as f64 + v[1] / a.n[1] as f64
        - v[1] / (a.n[1] + 1) as f64;
    assert!(
        a.predicted_error - best <= step,
        "{} vs {best}",
        a.predicted_error
    );
    let scaled = optimal_allocation(&[4.0, 1.0], &c, 0.01).unwrap();
    assert!(scaled
        .n
        .iter()
        .zip(&a.n)
        .all(|(&s, &n)| s.abs_diff(4 * n) <= 4));
}
