use std::path::Path;
use std::process::{Command, Output};

use qmc_core::discrepancy::{discrepancy_naive, t_value, KernelSpec, TValueMethod};
use qmc_core::generator::{build_generator, SequenceSpec};
use qmc_core::randomize::{Family, RandomizeKind, RandomizeSpec};
use qmc_core::seqgen::DigitalSpec;

const NET: &str = "3 3 3\n4 2 1\n4 6 5\n4 6 3\n";

fn qmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmc"))
        .args(args)
        .output()
        .expect("qmc runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qmc(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Data lines, without the echo and other comments.
fn data(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn echo(text: &str) -> Vec<String> {
    let first = text.lines().next().unwrap();
    first
        .strip_prefix("# qmc ")
        .expect("echo line")
        .split(' ')
        .map(String::from)
        .collect()
}

fn net_file(dir: &Path) -> String {
    let p = dir.join("net.txt");
    std::fs::write(&p, NET).unwrap();
    p.display().to_string()
}

#[test]
fn lattice_starts_at_the_origin() {
    let out = stdout(&[
        "generate", "--seq", "lattice", "--h", "1,11", "--n", "16", "--d", "2",
    ]);
    let rows = data(&out);
    assert_eq!(rows[0], "i,x1,x2");
    assert_eq!(rows[1], "0,0,0");
    assert_eq!(rows.len(), 17);
}

#[test]
fn extensible_sequences_accept_any_n() {
    let out = stdout(&["generate", "--seq", "lattice", "--d", "3", "--n", "17"]);
    assert_eq!(data(&out).len(), 18);
}

#[test]
fn generating_matrices_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let net = net_file(dir.path());
    let out = stdout(&[
        "generate",
        "--seq",
        "sobol",
        "--matrices",
        &net,
        "--n",
        "8",
        "--randomize",
        "none",
    ]);
    let rows = data(&out);
    assert_eq!(rows[3], "2,0.25,0.75,0.75");
    assert_eq!(rows[8], "7,0.875,0.875,0.125");

    let t = stdout(&["tvalue", "--matrices", &net, "--m", "3"]);
    assert_eq!(data(&t)[0], "t,1");
    let both = stdout(&["tvalue", "--matrices", &net, "--m", "3", "--method", "both"]);
    assert!(data(&both).contains(&"witness_k,2 0 1"));
    let lib = t_value(&DigitalSpec::parse(NET).unwrap(), 3, TValueMethod::Both).unwrap();
    assert_eq!(lib.t, 1);
}

#[test]
fn points_match_the_library_bit_for_bit() {
    for (seq, kind, d) in [
        ("sobol", RandomizeKind::LinearScramble, 5),
        ("lattice", RandomizeKind::ShiftMod1, 3),
        ("halton", RandomizeKind::HaltonPermute, 4),
        ("iid", RandomizeKind::None, 2),
    ] {
        let out = stdout(&[
            "generate",
            "--seq",
            seq,
            "--d",
            &d.to_string(),
            "--n",
            "100",
            "--seed",
            "9",
            "--randomize",
            kind.name(),
        ]);
        let family: Family = seq.parse().unwrap();
        let spec = SequenceSpec::default_for(family, d, 100).unwrap();
        let pts = build_generator(&spec, RandomizeSpec::new(kind, 9))
            .unwrap()
            .points(0, 100)
            .unwrap();
        for (i, line) in data(&out)[1..].iter().enumerate() {
            let xs: Vec<f64> = line
                .split(',')
                .skip(1)
                .map(|v| v.parse().unwrap())
                .collect();
            assert_eq!(xs, pts.point(i), "{seq} point {i}");
        }
    }
}

#[test]
fn discrepancy_matches_the_library() {
    let out = stdout(&["discrepancy", "--seq", "sobol", "--d", "1", "--n", "1"]);
    let rows = data(&out);
    assert_eq!(rows[0], "n,d,kernel,method,value,scaled");
    let value: f64 = rows[1].split(',').nth(4).unwrap().parse().unwrap();
    let pts = build_generator(
        &SequenceSpec::default_for(Family::Digital, 1, 1).unwrap(),
        RandomizeSpec::new(RandomizeKind::None, 0),
    )
    .unwrap()
    .points(0, 1)
    .unwrap();
    let lib = discrepancy_naive(&pts, &KernelSpec::centered())
        .unwrap()
        .value;
    assert_eq!(value.to_bits(), lib.to_bits());
    // the single point at the origin
    assert!((value - (13.0f64 / 12.0 - 2.0 * 1.125 + 1.5).sqrt()).abs() < 1e-15);
}

#[test]
fn echoed_config_reproduces_the_output() {
    let runs: [&[&str]; 7] = [
        &[
            "generate",
            "--seq",
            "sobol",
            "--d",
            "3",
            "--n",
            "20",
            "--randomize",
            "lms",
            "--seed",
            "5",
        ],
        &["generate", "--seq", "grid", "--d", "2", "--n", "10"],
        &[
            "discrepancy",
            "--seq",
            "lattice",
            "--d",
            "4",
            "--n",
            "64",
            "--weights",
            "inverse",
            "--method",
            "fast",
        ],
        &[
            "cbc",
            "--n",
            "64",
            "--d",
            "4",
            "--weights",
            "1,0.5,0.25,0.125",
        ],
        &["integrate", "--d", "3", "--eps", "0.01", "--seed", "3"],
        &["ml-integrate", "--eps", "0.01", "--seed", "2"],
        &[
            "benchmark",
            "keister",
            "--d",
            "2",
            "--m-range",
            "2:4",
            "--replications",
            "3",
        ],
    ];
    for args in runs {
        let first = stdout(args);
        let again = echo(&first);
        let refs: Vec<&str> = again.iter().map(String::as_str).collect();
        assert_eq!(stdout(&refs), first, "{args:?}");
    }
}

#[test]
fn out_flag_writes_the_same_text() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.csv");
    let args = ["generate", "--seq", "halton", "--d", "2", "--n", "5"];
    let printed = stdout(&args);
    let mut with_out = args.to_vec();
    let p = path.display().to_string();
    with_out.extend(["--out", &p]);
    assert!(stdout(&with_out).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| qmc(args).status.code().unwrap();
    assert_eq!(
        code(&[
            "generate",
            "--seq",
            "sobol",
            "--d",
            "2",
            "--n",
            "4",
            "--randomize",
            "shift"
        ]),
        2
    );
    assert_eq!(code(&["generate", "--seq", "sobol", "--n", "4"]), 2);
    assert_eq!(
        code(&["generate", "--seq", "nope", "--d", "2", "--n", "4"]),
        2
    );
    assert_eq!(code(&["cbc", "--n", "12", "--d", "2"]), 2);
    assert_eq!(
        code(&[
            "discrepancy",
            "--seq",
            "lattice",
            "--d",
            "2",
            "--n",
            "8",
            "--weights",
            "1"
        ]),
        2
    );
    assert_eq!(
        code(&["tvalue", "--matrices", "/nonexistent/net.txt", "--m", "3"]),
        2
    );
    // an unrandomized net hits 0, where the Gaussian transform is undefined
    assert_eq!(
        code(&[
            "integrate",
            "--seq",
            "sobol",
            "--randomize",
            "none",
            "--d",
            "2",
            "--eps",
            "0.1"
        ]),
        3
    );
    assert_eq!(
        code(&["generate", "--seq", "iid", "--d", "1", "--n", "1"]),
        0
    );
    let out = qmc(&[
        "generate",
        "--seq",
        "sobol",
        "--d",
        "2",
        "--n",
        "4",
        "--randomize",
        "shift",
    ]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
}

#[test]
fn keister_benchmark_orders_the_methods() {
    let out = stdout(&["benchmark", "keister", "--d", "6", "--mmax", "14"]);
    let rows = data(&out);
    assert_eq!(rows[0], "method,n,replication,estimate,abs_err,rel_err");
    let mean = |method: &str| {
        let errs: Vec<f64> = rows[1..]
            .iter()
            .map(|r| r.split(',').collect::<Vec<_>>())
            .filter(|c| c[0] == method && c[1] == "16384")
            .map(|c| c[5].parse().unwrap())
            .collect();
        assert!(!errs.is_empty(), "{method}");
        errs.iter().sum::<f64>() / errs.len() as f64
    };
    assert!(mean("ld") < mean("iid"));
    assert_eq!(
        rows[1..]
            .iter()
            .filter(|r| r.starts_with("iid,16384,"))
            .count(),
        50
    );
}
