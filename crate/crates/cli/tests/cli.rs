use std::path::Path;
use std::process::{Command, Output};

fn psiac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psiac"))
        .args(args)
        .env_remove("PSIAC_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn symmetric_linear_kernel_coefficients() {
    let out = stdout(&psiac(&["kernel", "symmetric", "1", "interior", "--exact"]));
    assert_eq!(out, "j,coefficient\n0,-1/12\n1,7/6\n2,-1/12\n");
}

#[test]
fn boundary_kernels_give_one_polynomial_per_spline() {
    let np0 = csv_rows(&stdout(&psiac(&["kernel", "NP0", "3", "left", "--exact"])));
    let srv = csv_rows(&stdout(&psiac(&["kernel", "SRV", "3", "left", "--exact"])));
    assert_eq!(np0.len() - 1, 10);
    assert_eq!(srv.len() - 1, 13);
    for row in np0[1..].iter().chain(&srv[1..]) {
        for entry in &row[1..] {
            assert!(entry.parse::<psiac::Rational>().is_ok(), "{entry}");
        }
    }
}

#[test]
fn srv_coefficients_dwarf_np0_at_the_boundary() {
    let magnitude = |fam: &str| {
        let text = stdout(&psiac(&["kernel", fam, "3", "left", "--samples", "400"]));
        csv_rows(&text)[1..]
            .iter()
            .map(|r| r[1].parse::<f64>().unwrap().abs())
            .fold(0.0, f64::max)
    };
    assert!(magnitude("SRV") > 30.0 * magnitude("NP0"));
}

#[test]
fn kernel_samples_and_shift() {
    let rows = csv_rows(&stdout(&psiac(&[
        "kernel",
        "RS",
        "2",
        "right",
        "--samples",
        "7",
    ])));
    assert_eq!(rows[0], ["x", "value"]);
    assert_eq!(rows.len(), 8);
    let at_shift = stdout(&psiac(&["kernel", "SRV", "1", "left", "--shift", "-1/2"]));
    assert!(at_shift.starts_with("j,coefficient\n"));
    assert_eq!(at_shift.lines().count(), 6);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["kernel", "XYZ", "1", "left"][..],
        &["kernel", "RS", "0", "left"],
        &["kernel", "RS", "1", "left", "--exact", "--samples", "4"],
        &["kernel", "RS", "1", "left", "--samples", "1"],
        &["solve", "--problem", "tp4", "-d", "1", "-n", "10"],
        &[
            "solve",
            "--problem",
            "tp1",
            "-d",
            "1",
            "-n",
            "10",
            "--bogus",
        ],
        &["converge", "--problem", "tp1", "--meshes", "20,30"],
        &["timeseries", "does/not/exist.toml"],
    ] {
        let o = psiac(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?} started computing");
    }
}

#[test]
fn runtime_errors_exit_with_one() {
    // Two elements cannot hold an SRV window.
    let o = psiac(&[
        "filter",
        "--problem",
        "tp1",
        "-d",
        "1",
        "-n",
        "2",
        "--family",
        "SRV",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn every_subcommand_documents_its_flags() {
    for (cmd, flags) in [
        ("kernel", &["--exact", "--samples", "--shift", "--out"][..]),
        (
            "solve",
            &[
                "--problem",
                "--degree",
                "--elements",
                "--time",
                "--cfl",
                "--out",
                "--coeffs",
            ],
        ),
        ("filter", &["--family", "--blend-rho", "--out", "--coeffs"]),
        (
            "converge",
            &[
                "--problem",
                "--degrees",
                "--filters",
                "--meshes",
                "--times",
                "--sequential",
            ],
        ),
        (
            "timeseries",
            &[
                "<CONFIG>",
                "--time-count",
                "--time-end",
                "--blend-rho",
                "--out",
            ],
        ),
    ] {
        let help = stdout(&psiac(&[cmd, "--help"]));
        for f in flags {
            assert!(help.contains(f), "{cmd} --help lacks {f}");
        }
        assert!(help.contains("--out-dir"));
    }
}

#[test]
fn solve_writes_field_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    let (c, u) = (dir.path().join("c.csv"), dir.path().join("u.csv"));
    let o = psiac(&[
        "solve",
        "--problem",
        "tp3",
        "-d",
        "2",
        "-n",
        "10",
        "-t",
        "0.5",
        "--coeffs",
        c.to_str().unwrap(),
        "--out",
        u.to_str().unwrap(),
    ]);
    stdout(&o);
    let coeffs = csv_rows(&std::fs::read_to_string(&c).unwrap());
    assert_eq!(coeffs[0], ["element", "basis", "coefficient"]);
    assert_eq!(coeffs.len() - 1, 10 * 3);
    let curve = csv_rows(&std::fs::read_to_string(&u).unwrap());
    assert_eq!(curve[0], ["x", "u", "exact", "error"]);
    assert_eq!(curve.len() - 1, 10 * 6);
    for r in &curve[1..] {
        assert!(r[3].parse::<f64>().unwrap().abs() < 1e-2);
    }
}

#[test]
fn filter_output_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_psiac"))
        .args([
            "filter",
            "--problem",
            "tp2",
            "-d",
            "1",
            "-n",
            "40",
            "-t",
            "1",
            "--family",
            "SRV",
        ])
        .env("PSIAC_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let coeffs =
        csv_rows(&std::fs::read_to_string(dir.path().join("tp2_d1_n40_srv_coeffs.csv")).unwrap());
    let left = coeffs.iter().filter(|r| r[0] == "left").count();
    assert!(left > 1);
    assert_eq!(coeffs.len() - 1, 2 * left);
    for r in &coeffs[1..] {
        let float: f64 = r[4].parse().unwrap();
        let (p, q) = r[6].split_once('/').unwrap_or((&r[6], "1"));
        let exact = p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap();
        assert!(
            (float - exact).abs() <= 1e-12 * (1.0 + exact.abs()),
            "{r:?}"
        );
    }
    let curve =
        csv_rows(&std::fs::read_to_string(dir.path().join("tp2_d1_n40_srv_curve.csv")).unwrap());
    assert_eq!(curve[0], ["x", "value", "exact_solution", "abs_error"]);
    assert_eq!(curve.len() - 1, 40 * 6);
    let worst = curve[1..]
        .iter()
        .map(|r| r[3].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(worst < 1e-3, "worst filtered error {worst:e}");
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn timeseries_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "problem = \"tp1\"\ndegrees = [1]\nmeshes = [20, 40]\ntimes = { count = 2, end = 0.5 }\n",
    );
    let text = stdout(&psiac(&["timeseries", &cfg]));
    let rows = csv_rows(&text);
    assert_eq!(rows[0].join(","), psiac::harness::CSV_HEADER);
    // Six filters, ten region/filter pairs, two norms.
    let errors = rows.iter().filter(|r| r[8] == "error").count();
    let rates = rows.iter().filter(|r| r[8] == "rate").count();
    assert_eq!(errors, 10 * 2 * 2 * 2);
    assert_eq!(rates, 10 * 2 * 2);
    let path = dir.path().join("out.csv");
    stdout(&psiac(&[
        "timeseries",
        &cfg,
        "--out",
        path.to_str().unwrap(),
    ]));
    let (e, r) = psiac::harness::read_csv(&path).unwrap();
    assert_eq!((e.len(), r.len()), (errors, rates));
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "problem = \"tp1\"\ndegrees = [2]\nmeshes = [20, 40]\ntimes = [0.25]\n",
    );
    let text = stdout(&psiac(&[
        "timeseries",
        &cfg,
        "--degrees",
        "1",
        "--filters",
        "NP0",
        "--sequential",
    ]));
    let rows = csv_rows(&text);
    assert!(rows[1..].iter().all(|r| r[1] == "1" && r[2] == "NP0"));
    assert!(!rows[1..].is_empty());
}

#[test]
fn empty_filter_set_gives_a_header_only_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "problem = \"tp2\"\nfilters = []\n");
    let text = stdout(&psiac(&["timeseries", &cfg]));
    assert_eq!(text.trim_end(), psiac::harness::CSV_HEADER);
}

#[test]
fn bad_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        "problem = \"tp9\"\n",
        "problem = \"tp1\"\nmesh = [20]\n",
        "problem = ",
        "problem = \"tp1\"\ndegrees = []\n",
    ] {
        let cfg = write_config(dir.path(), body);
        let o = psiac(&["timeseries", &cfg]);
        assert_eq!(o.status.code(), Some(2), "{body}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["tp1.toml", "tp2.toml", "tp3.toml"] {
        // Overrides shrink the run to a single cheap solve.
        let o = psiac(&[
            "timeseries",
            root.join(name).to_str().unwrap(),
            "--degrees",
            "1",
            "--meshes",
            "20",
            "--times",
            "0",
            "--filters",
            "DG",
        ]);
        assert_eq!(stdout(&o).lines().count(), 3, "{name}");
    }
}
