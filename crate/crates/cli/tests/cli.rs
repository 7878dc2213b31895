use std::path::Path;
use std::process::{Command, Output};

fn cascade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cascade"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = cascade(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stderr.is_empty());
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str]) -> String {
    let out = cascade(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(!err.is_empty());
    err
}

fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<String> {
    let k = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[k].clone()).collect()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn calibrate_writes_reproducible_likelihood() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = [
        "calibrate",
        "--locations",
        "10",
        "--samples",
        "100000",
        "--seed",
        "1",
        "--out",
    ];
    ok(&[&base[..], &[path(&a)]].concat());
    ok(&[&base[..], &[path(&b)]].concat());
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let (header, rows) = table(&text);
    assert_eq!(header, (0..10).map(|t| format!("t{t}")).collect::<Vec<_>>());
    assert_eq!(rows.len(), 10);
    let diag: f64 = rows[3][3].parse().unwrap();
    assert!((diag - 0.180).abs() < 0.005, "diagonal {diag}");
    for row in &rows {
        for v in row {
            let digits = v
                .trim_start_matches("0.")
                .trim_start_matches('0')
                .replace('.', "");
            assert!(digits.len() <= 9, "{v}");
        }
    }
}

#[test]
fn calibrate_rejects_small_samples_and_bad_paths() {
    let err = fails(&["calibrate", "--samples", "100"]);
    assert!(err.contains("100"), "{err}");
    let err = fails(&["calibrate", "--out", "/nonexistent/dir/lik.csv"]);
    assert!(err.contains("/nonexistent/dir/lik.csv"), "{err}");
}

#[test]
fn run_reports_one_row_per_selector() {
    let dir = tempfile::tempdir().unwrap();
    let lik = dir.path().join("lik.csv");
    ok(&["calibrate", "--samples", "20000", "--out", path(&lik)]);
    let args = [
        "run",
        "single-social",
        "--runs",
        "10",
        "--turns",
        "200",
        "--seed",
        "4",
        "--likelihood",
        path(&lik),
    ];
    let text = ok(&args);
    assert_eq!(text, ok(&args));
    let (header, rows) = table(&text);
    assert_eq!(
        header,
        [
            "scenario",
            "selector",
            "n_locations",
            "n_agents",
            "p_change",
            "obs_prob",
            "focal_obs_prob",
            "runs",
            "turns",
            "seed",
            "performance",
            "mi_bits",
            "mean_turns_to_find"
        ]
    );
    assert_eq!(
        column(&header, &rows, "selector"),
        ["population", "agent0", "except0"]
    );
    assert_eq!(column(&header, &rows, "obs_prob"), ["100"; 3]);
    assert_eq!(column(&header, &rows, "runs"), ["10"; 3]);
    for p in column(&header, &rows, "performance") {
        let p: f64 = p.parse().unwrap();
        assert!((0.0..=1.0).contains(&p));
    }
}

#[test]
fn run_single_matches_calibration() {
    let text = ok(&[
        "run", "single", "--runs", "50", "--turns", "1000", "--seed", "1",
    ]);
    let (header, rows) = table(&text);
    assert_eq!(rows.len(), 1);
    let perf: f64 = column(&header, &rows, "performance")[0].parse().unwrap();
    assert!((perf - 0.180).abs() < 0.01, "performance {perf}");
    let turns: f64 = column(&header, &rows, "mean_turns_to_find")[0]
        .parse()
        .unwrap();
    assert!((turns - 5.5).abs() < 0.2, "turns {turns}");
}

#[test]
fn run_writes_to_file_and_honours_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        "# small\nagents = 3\nruns = 4\nturns = 50\nseed = 9\n",
    )
    .unwrap();
    let out = dir.path().join("out.csv");
    ok(&[
        "run",
        "single",
        "--config",
        path(&cfg),
        "--agents",
        "2",
        "--out",
        path(&out),
    ]);
    let (header, rows) = table(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(column(&header, &rows, "n_agents"), ["2"]);
    assert_eq!(column(&header, &rows, "runs"), ["4"]);
    assert_eq!(column(&header, &rows, "seed"), ["9"]);
}

#[test]
fn run_errors() {
    let err = fails(&["run", "bogus"]);
    assert!(
        err.contains("single-social") && err.contains("partial"),
        "{err}"
    );
    let err = fails(&["run", "single", "--obs-prob", "150"]);
    assert!(err.contains("obs_prob"), "{err}");
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "colour = red\n").unwrap();
    let err = fails(&["run", "single", "--config", path(&cfg)]);
    assert!(err.contains("colour"), "{err}");
    let err = fails(&["run", "single", "--likelihood", "/nonexistent.csv"]);
    assert!(err.contains("/nonexistent.csv"), "{err}");
}

#[test]
fn sweep_rows_per_grid_point() {
    let args = [
        "sweep",
        "--parameter",
        "focal",
        "--start",
        "0",
        "--stop",
        "20",
        "--step",
        "10",
        "--obs-prob",
        "30",
        "--runs",
        "4",
        "--turns",
        "100",
        "--agents",
        "4",
        "--calibration-samples",
        "10000",
    ];
    let text = ok(&args);
    assert_eq!(text, ok(&args));
    let (header, rows) = table(&text);
    assert_eq!(column(&header, &rows, "percent"), ["0", "10", "20"]);
    assert_eq!(column(&header, &rows, "focal_obs_prob"), ["0", "10", "20"]);
    assert_eq!(column(&header, &rows, "obs_prob"), ["30"; 3]);
    assert_eq!(column(&header, &rows, "selector"), ["agent0"; 3]);
    assert!(header.iter().any(|h| h == "ri_bits"));
}

#[test]
fn sweep_rejects_malformed_grid() {
    let err = fails(&["sweep", "--start", "60", "--stop", "40"]);
    assert!(err.contains("grid"), "{err}");
    let err = fails(&["sweep", "--step", "0"]);
    assert!(err.contains("grid"), "{err}");
    let err = fails(&["sweep", "--parameter", "everyone"]);
    assert!(err.contains("everyone"), "{err}");
}

fn curve(text: &str) -> Vec<(f64, f64)> {
    let (header, rows) = table(text);
    assert_eq!(header, ["u", "ri_bits"]);
    rows.iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect()
}

#[test]
fn ri_curve_closed_form() {
    let points = curve(&ok(&["ri-curve"]));
    assert_eq!(points.len(), 1001);
    let at = |u: f64| points.iter().find(|p| (p.0 - u).abs() < 1e-12).unwrap().1;
    assert_eq!(at(0.1), 0.0);
    assert!((at(1.0) - std::f64::consts::LOG2_10).abs() < 1e-6);
}

#[test]
fn ri_curve_solver_matches_closed_form() {
    let grid = ["--start", "0.1", "--stop", "0.9", "--step", "0.1"];
    let closed = curve(&ok(&[&["ri-curve"], &grid[..]].concat()));
    let solved = curve(&ok(&[&["ri-curve", "--solver"], &grid[..]].concat()));
    assert_eq!(closed.len(), solved.len());
    for (c, s) in closed.iter().zip(&solved) {
        assert_eq!(c.0, s.0);
        assert!((c.1 - s.1).abs() < 1e-3, "u {}: {} vs {}", c.0, c.1, s.1);
    }
}

#[test]
fn ri_curve_custom_utility() {
    let dir = tempfile::tempdir().unwrap();
    let u = dir.path().join("u.csv");
    std::fs::write(&u, "s0,s1\n1,0\n0,1\n").unwrap();
    let points = curve(&ok(&[
        "ri-curve",
        "--utility",
        path(&u),
        "--start",
        "0.5",
        "--stop",
        "0.9",
        "--step",
        "0.4",
    ]));
    assert!(points[0].1.abs() < 1e-6);
    // One bit minus the binary entropy of 0.1.
    assert!((points[1].1 - 0.531004).abs() < 1e-3, "{}", points[1].1);
    std::fs::write(&u, "s0,s1\n0.5,0\n0,0.5\n").unwrap();
    let err = fails(&[
        "ri-curve",
        "--utility",
        path(&u),
        "--start",
        "0.9",
        "--stop",
        "0.9",
    ]);
    assert!(err.contains("0.9"), "{err}");
}
