use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const MATERIAL: &str = "pbfmat 1\n4430 534.26 20 1000\n";
const PATH: &str = "pbfpath 1\nmelt 0 0 2 0 100 0.1 1000\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbfheat")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn inputs(dir: &Path, path: &str) -> (PathBuf, PathBuf) {
    let p = dir.join("track.path");
    let m = dir.join("material.mat");
    std::fs::write(&p, path).unwrap();
    std::fs::write(&m, MATERIAL).unwrap();
    (p, m)
}

fn solve(dir: &Path, path: &str, out: &str, threads: &str) -> Output {
    let (p, m) = inputs(dir, path);
    let out = dir.join(out);
    run(&[
        "--threads",
        threads,
        "solve",
        "--path",
        p.to_str().unwrap(),
        "--material",
        m.to_str().unwrap(),
        "--grid",
        "0:0.002:9,-2e-4:2e-4:5,-1e-4:0:2",
        "--times",
        "5e-4:2e-3:4",
        "--force-ref-order",
        "--out",
        out.to_str().unwrap(),
    ])
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('t'))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["gen-lut", "--tol", "-1"])), 1);
    assert_eq!(code(&run(&["gen-lut", "--tol", "0"])), 1);
    assert_eq!(code(&run(&["example", "4"])), 1);
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for cmd in ["gen-lut", "solve", "example", "audit", "heatmap"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn solve_writes_field_csv() {
    let dir = TempDir::new().unwrap();
    let o = solve(dir.path(), PATH, "field.csv", "2");
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("field.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "t,x,y,z,u"));
    assert!(csv.contains("# path_sha256="));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 4 * 9 * 5 * 2);
    assert!(rows.iter().all(|r| r.len() == 5 && r[4] >= 1000.0));
    assert!(rows.iter().any(|r| r[4] > 2000.0));
}

#[test]
fn zero_power_gives_initial_temperature() {
    let dir = TempDir::new().unwrap();
    let o = solve(dir.path(), "pbfpath 1\nmelt 0 0 2 0 0 0.1 1000\n", "cold.csv", "1");
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("cold.csv")).unwrap();
    assert!(data_rows(&csv).iter().all(|r| r[4] == 1000.0));
}

#[test]
fn output_independent_of_thread_count() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&solve(dir.path(), PATH, "a.csv", "1")), 0);
    assert_eq!(code(&solve(dir.path(), PATH, "b.csv", "4")), 0);
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn heatmap_is_reproducible() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&solve(dir.path(), PATH, "field.csv", "2")), 0);
    let field = dir.path().join("field.csv");
    let mut images = Vec::new();
    for name in ["a.ppm", "b.ppm"] {
        let out = dir.path().join(name);
        let o = run(&[
            "heatmap",
            "--field",
            field.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        images.push(std::fs::read(out).unwrap());
    }
    assert_eq!(images[0], images[1]);
    assert!(images[0].starts_with(b"P6\n9 5\n255\n"));
    assert_eq!(images[0].len(), b"P6\n9 5\n255\n".len() + 9 * 5 * 3);

    let out = dir.path().join("c.ppm");
    let o = run(&[
        "heatmap",
        "--field",
        field.to_str().unwrap(),
        "--time",
        "1",
        "--range",
        "1000:3000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        code(&run(&[
            "heatmap",
            "--field",
            field.to_str().unwrap(),
            "--time",
            "9",
            "--out",
            "x.ppm"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "heatmap",
            "--field",
            field.to_str().unwrap(),
            "--range",
            "5:1",
            "--out",
            "x.ppm"
        ])),
        1
    );
}

#[test]
fn missing_input_exits_three() {
    let dir = TempDir::new().unwrap();
    let (_, m) = inputs(dir.path(), PATH);
    let o = run(&[
        "solve",
        "--path",
        dir.path().join("nope.path").to_str().unwrap(),
        "--material",
        m.to_str().unwrap(),
        "--grid",
        "0,0,0",
        "--times",
        "1e-3",
        "--force-ref-order",
    ]);
    assert_eq!(code(&o), 3);
    let o = run(&["audit", "lut", "--lut-dir", dir.path().join("none").to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn malformed_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let o = solve(dir.path(), "pbfpath 1\nmelt 0 0 two 0 100 0.1 1000\n", "bad.csv", "1");
    assert_eq!(code(&o), 2);
    // beyond the end of the path
    let (p, m) = inputs(dir.path(), PATH);
    let o = run(&[
        "solve",
        "--path",
        p.to_str().unwrap(),
        "--material",
        m.to_str().unwrap(),
        "--grid",
        "0,0,0",
        "--times",
        "1",
        "--force-ref-order",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn semigroup_audit_passes() {
    let o = run(&["audit", "semigroup"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn small_tables_round_trip_through_solve() {
    let dir = TempDir::new().unwrap();
    let luts = dir.path().join("luts");
    let o = run(&[
        "gen-lut",
        "--lut-dir",
        luts.to_str().unwrap(),
        "--sizes",
        "3:3:2",
        "--ref-order",
        "200",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("flux table") && stdout.contains("contribution table"));
    assert!(std::fs::read(luts.join("flux.lut")).unwrap().starts_with(b"PBFLUT1"));

    let (p, m) = inputs(dir.path(), PATH);
    let out = dir.path().join("lut.csv");
    let o = run(&[
        "solve",
        "--path",
        p.to_str().unwrap(),
        "--material",
        m.to_str().unwrap(),
        "--grid",
        "0:0.002:5,0,0",
        "--times",
        "1e-3:2e-3:2",
        "--lut-dir",
        luts.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.contains("flux:") && csv.contains("contribution:"));
}

#[test]
fn example_one_reports_partition_agreement() {
    let dir = TempDir::new().unwrap();
    let o = run(&["example", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stdout).unwrap().contains("sup |du|"));
    for f in ["example1_single.path", "example1_split.path", "material.mat"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn examples_need_tables_or_forced_order() {
    let dir = TempDir::new().unwrap();
    let o = run(&["example", "2", "--lut-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8(o.stderr).unwrap().contains("gen-lut"));
}
