use std::path::Path;

use proptest::prelude::*;
use spherepd::oracle::{sample_points, Distinctness};
use spherepd::quadrature::{CoefficientGrid, Mode, Provenance};
use spherepd::SphereDim;
use spherepd_cli::formats::{
    parse_grid, parse_points, parse_problem, write_grid, write_points, write_problem,
};
use spherepd_cli::kernels::parse_kernel;
use spherepd_cli::{run, Outcome};

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("spherepd").chain(args.iter().copied()))
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn value(out: &Outcome, key: &str) -> f64 {
    let prefix = format!("{key}: ");
    out.stdout
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in {}", out.stdout))
        .parse()
        .unwrap()
}

fn setup(dir: &Path) {
    std::fs::write(
        dir.join("nonneg.csv"),
        "# mode=CHECK m=2 M=2 K=3 L=3\n0,0,1\n1,1,0.5\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("neg.csv"),
        "# mode=CHECK m=2 M=2 K=3 L=3\n0,0,1\n2,3,-0.1\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("negq.csv"),
        "# mode=CHECK m=2 M=2 K=3 L=3 source=quadrature\n0,0,1\n2,3,-0.1\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("inf.csv"),
        "# mode=CHECK m=inf M=inf K=2 L=2\n1,1,1\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("broken.csv"),
        "# mode=CHECK m=2 M=2 K=1 L=1\n0,0\n",
    )
    .unwrap();
    let p = sample_points(
        SphereDim::Finite(2),
        SphereDim::Finite(1),
        6,
        3,
        Distinctness::Pairs,
    )
    .unwrap();
    std::fs::write(dir.join("pts.txt"), write_points(&p)).unwrap();
    let targets: Vec<f64> = (0..6).map(|i| i as f64 - 2.5).collect();
    std::fs::write(dir.join("prob.txt"), write_problem(&p, &targets)).unwrap();
}

#[test]
fn exit_code_contract() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path());
    let d = dir.path().to_str().unwrap();
    let cases: &[(&str, i32)] = &[
        ("analyze --kernel cm_exp:a=1,b=1 --m 2 --M 2 --K 3 --L 3", 0),
        (
            "analyze --kernel cm_exp:a=1,b=1 --m inf --M 2 --K 3 --L 3",
            2,
        ),
        (
            "analyze --kernel cm_exp:a=1,b=1 --m 2 --M 2 --K 3 --L 3 --out {d}/missing/g.csv",
            2,
        ),
        ("synth --grid {d}/nonneg.csv --t 0.3 --s -0.2", 0),
        ("synth --grid {d}/inf.csv --t 0.3 --s -0.2", 0),
        ("synth --grid {d}/broken.csv --t 0 --s 0", 2),
        ("synth --grid {d}/nonneg.csv --t 1.5 --s 0", 2),
        ("certify --grid {d}/nonneg.csv --tol 1e-8", 0),
        ("certify --grid {d}/inf.csv", 0),
        ("certify --grid {d}/neg.csv", 1),
        ("certify --grid {d}/negq.csv", 0),
        ("certify --grid {d}/neg.csv --source quadrature", 0),
        ("certify --grid {d}/nope.csv", 2),
        ("gram --kernel const:c=-1 --m 2 --M 2 --n 5 --seed 1", 1),
        ("gram --kernel cm_exp:a=1,b=1 --m 2 --M 2 --n 5", 0),
        ("gram --kernel cm_exp:a=1,b=1 --points {d}/pts.txt", 0),
        ("gram --kernel cm_exp:a=1,b=1 --m inf --M 2 --n 5", 2),
        ("gram --kernel nope --m 2 --M 2 --n 5", 2),
        ("strict --kernel cm_exp:a=1,b=1 --m 2 --M 2 --n 5", 0),
        ("strict --kernel const:c=1 --m 2 --M 2 --n 3", 1),
        ("strict --kernel const:c=1 --m 2 --M inf --n 3", 2),
        (
            "dcstrict --kernel cm_pow:alpha=1,beta=0 --m 2 --M 2 --n 5",
            0,
        ),
        ("dcstrict --kernel prod:f=lin,g=lin --m 2 --M 2 --n 12", 1),
        ("dimwalk --grid {d}/nonneg.csv", 0),
        ("dimwalk --grid {d}/inf.csv", 2),
        ("dimwalk --grid {d}/nonneg.csv --axis 3", 2),
        (
            "limit --kernel cm_exp:a=1,b=1 --M inf --K 2 --L 2 --ms 4,8",
            0,
        ),
        (
            "limit --kernel cm_exp:a=1,b=1 --M 2 --K 2 --L 2 --ms 3,8",
            2,
        ),
        (
            "interp --kernel cm_exp:a=1,b=1 --problem {d}/prob.txt --loo --eval {d}/pts.txt",
            0,
        ),
        ("interp --kernel const:c=-1 --problem {d}/prob.txt", 2),
        ("interp --kernel cm_exp:a=1,b=1 --problem {d}/pts.txt", 2),
        ("table --kernel const:c=1 --m 2 --M 2 --K 2 --L 2", 0),
        ("table --kernel const:c=1 --m 2 --M 2 --K x --L 2", 2),
        ("bogus", 2),
        ("gram --frobnicate", 2),
        ("", 2),
        ("--help", 0),
    ];
    for &(line, want) in cases {
        let line = line.replace("{d}", d);
        let args: Vec<&str> = line.split_whitespace().collect();
        let out = cli(&args);
        assert_eq!(
            out.code, want,
            "{line}\nstdout: {}\nstderr: {}",
            out.stdout, out.stderr
        );
        if want == 2 {
            assert!(out.stderr.starts_with("error:"), "{line}: {}", out.stderr);
            assert!(out.stdout.is_empty());
        }
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_spherepd");
    let status = |args: &[&str]| std::process::Command::new(bin).args(args).output().unwrap();
    let out = status(&[
        "gram",
        "--kernel",
        "const:c=-1",
        "--m",
        "2",
        "--M",
        "2",
        "--n",
        "5",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("verdict: INDEFINITE"));
    let out = status(&["gram", "--kernel", "bad"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));
}

#[test]
fn certify_examples() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path());
    let out = cli(&[
        "certify",
        "--grid",
        &path(dir.path(), "nonneg.csv"),
        "--tol",
        "1e-8",
    ]);
    assert!(out.stdout.contains("PD_CERTIFIED"));
    let out = cli(&["certify", "--grid", &path(dir.path(), "neg.csv")]);
    assert!(out.stdout.contains("NOT_PD") && out.stdout.contains("k=2 l=3"));
    let out = cli(&["certify", "--grid", &path(dir.path(), "negq.csv")]);
    assert!(out.stdout.contains("INCONCLUSIVE"));
}

#[test]
fn analyze_then_synth_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "g.csv");
    let kernel = "cm_exp:a=1,b=1";
    let out = cli(&[
        "analyze", "--kernel", kernel, "--m", "2", "--M", "2", "--K", "8", "--L", "8", "--out", &g,
    ]);
    assert_eq!(out.code, 0);
    let grid = parse_grid(&std::fs::read_to_string(&g).unwrap()).unwrap();
    assert!(grid.values().iter().all(|&v| v >= -1e-8));
    assert_eq!(grid.provenance(), Provenance::Quadrature);

    let k = parse_kernel(kernel).unwrap();
    let tail = (value(
        &cli(&["synth", "--grid", &g, "--t", "1", "--s", "1"]),
        "value",
    ) - k.eval(1.0, 1.0))
    .abs();
    let v = value(
        &cli(&["synth", "--grid", &g, "--t", "0.3", "--s", "-0.2"]),
        "value",
    );
    assert!(
        (v - k.eval(0.3, -0.2)).abs() <= tail,
        "{v} vs {} (tail {tail})",
        k.eval(0.3, -0.2)
    );
}

#[test]
fn table_examples() {
    let cells = |out: &Outcome| -> Vec<Vec<String>> {
        out.stdout
            .lines()
            .skip(2)
            .map(|l| l.split_whitespace().skip(1).map(String::from).collect())
            .collect()
    };
    let out = cli(&[
        "table",
        "--kernel",
        "const:c=1",
        "--m",
        "2",
        "--M",
        "2",
        "--K",
        "3",
        "--L",
        "3",
    ]);
    let c = cells(&out);
    assert_eq!(c[0][0], "1.00000e0");
    assert_eq!(c.iter().flatten().filter(|v| *v != "0").count(), 1);

    let out = cli(&[
        "table",
        "--kernel",
        "prod:f=lin,g=lin",
        "--m",
        "2",
        "--M",
        "2",
        "--K",
        "3",
        "--L",
        "3",
    ]);
    let c = cells(&out);
    assert_eq!(c[1][1], "1.00000e0");
    assert_eq!(c.iter().flatten().filter(|v| *v != "0").count(), 1);

    let out = cli(&[
        "table",
        "--kernel",
        "cm_exp:a=1,b=1",
        "--m",
        "2",
        "--M",
        "2",
        "--K",
        "4",
        "--L",
        "4",
    ]);
    assert!(cells(&out)[0][0].parse::<f64>().unwrap() > 0.0);
    let widths: Vec<usize> = out.stdout.lines().skip(1).map(str::len).collect();
    assert!(widths.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn reports_print_the_seed() {
    let out = cli(&[
        "gram",
        "--kernel",
        "cm_exp:a=1,b=1",
        "--m",
        "2",
        "--M",
        "2",
        "--n",
        "4",
    ]);
    assert!(out.stdout.contains("seed: 0\n"));
    let out = cli(&[
        "strict",
        "--kernel",
        "cm_exp:a=1,b=1",
        "--m",
        "2",
        "--M",
        "2",
        "--n",
        "4",
        "--seed",
        "9",
    ]);
    assert!(out.stdout.contains("seed: 9\n"));
}

fn dim() -> impl Strategy<Value = SphereDim> {
    prop_oneof![
        (1u32..12).prop_map(SphereDim::Finite),
        Just(SphereDim::Infinite)
    ]
}

proptest! {
    #[test]
    fn grid_text_round_trip(
        dt in dim(),
        ds in dim(),
        k in 0usize..6,
        l in 0usize..6,
        hat in any::<bool>(),
        quad in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let mode = if hat && dt.is_finite() && ds.is_finite() { Mode::Hat } else { Mode::Check };
        let mut state = seed;
        let values = (0..(k + 1) * (l + 1))
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                f64::from_bits((state >> 12) | 0x3ff0_0000_0000_0000) - 1.5
            })
            .collect();
        let g = CoefficientGrid::from_values(dt, ds, k, l, mode, values).unwrap();
        let g = if quad { g.with_provenance(Provenance::Quadrature) } else { g };
        prop_assert_eq!(parse_grid(&write_grid(&g)).unwrap(), g);
    }

    #[test]
    fn point_text_round_trip(m in 1u32..6, big_m in 1u32..6, n in 1usize..12, seed in any::<u64>()) {
        let p = sample_points(SphereDim::Finite(m), SphereDim::Finite(big_m), n, seed, Distinctness::Pairs).unwrap();
        prop_assert_eq!(&parse_points(&write_points(&p)).unwrap(), &p);
        let t: Vec<f64> = (0..n).map(|i| (i as f64).sin() * 1e3).collect();
        prop_assert_eq!(parse_problem(&write_problem(&p, &t)).unwrap(), (p, t));
    }
}
