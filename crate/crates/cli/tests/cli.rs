use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_netdefense"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn stdout_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let first = text.find('{').expect("json on stdout");
    serde_json::Deserializer::from_str(&text[first..])
        .into_iter::<Value>()
        .next()
        .unwrap()
        .unwrap()
}

const RING_NO_NOISE: &str = r#"{"graph":{"generator":"ring:6"},"defenders":[1],
    "attackers":[{"node":3,"s":2.5,"r":0.0}],"t_f":1.0,"eps":0.0}"#;

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&["gen", "chain:1"])), 2);
    assert_eq!(code(&run(&["gen", "lattice:4"])), 2);
    let scalar = scenario("scalar.json");
    assert_eq!(code(&run(&["simulate", scalar.to_str().unwrap(), "--dt", "0"])), 2);
}

#[test]
fn infeasible_problems_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let same = write(
        dir.path(),
        "same.json",
        r#"{"graph":{"generator":"chain:4"},"defenders":[1],"attackers":[{"node":1,"s":1.0,"r":0.0}],"t_f":1.0}"#,
    );
    assert_eq!(code(&run(&["analyze", &same])), 3);

    let ring = write(dir.path(), "ring.json", RING_NO_NOISE);
    let out = run(&["analyze", &ring]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("[1]"));

    let sweep = write(
        dir.path(),
        "sweep.json",
        r#"{"graph":{"generator":"ring:6"},"defenders":[1],"attacker":{"s":2.5,"r":0.0},
            "t_f":1.0,"eps":0.0,"realizations":2,"max_retries":2}"#,
    );
    let out = run(&["sweep", &sweep]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("2 noise draws"));
}

#[test]
fn singular_grid_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario("toy_grid.json")).unwrap();
    let zero_m = write(dir.path(), "grid.json", &text.replace(r#""M": [1.0]"#, r#""M": [0.0]"#));
    let out = run(&["grid", &zero_m, "--loads", "1", "--generators", "1"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn missing_file_is_an_io_failure() {
    assert_eq!(code(&run(&["analyze", "/nonexistent/scenario.json"])), 1);
}

#[test]
fn closed_loop_reaches_the_target() {
    let out = run(&["simulate", scenario("scalar.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    // the trajectory goes to stdout as CSV, the summary to stderr
    let summary: Value = serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert!(summary["terminal_norm"].as_f64().unwrap() <= 1e-8);
    let e = summary["min_energy"].as_f64().unwrap();
    assert!((summary["realized_energy"].as_f64().unwrap() - e).abs() < 1e-6 * e);
    let csv = String::from_utf8_lossy(&out.stdout);
    assert!(csv.starts_with("t,x_1,u_1"));
    assert_eq!(csv.lines().count(), 1002);
}

#[test]
fn open_loop_reports_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("open.csv");
    let out = run(&[
        "simulate",
        scenario("chain_node6.json").to_str().unwrap(),
        "--mode",
        "open",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let summary = stdout_json(&out);
    assert_eq!(summary["diverging"], Value::Bool(true));
    assert!(csv.exists());
}

#[test]
fn sweeps_are_reproducible_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("chain_sweep.json");
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for (path, threads) in [(&first, "1"), (&second, "3")] {
        let out = run(&["--threads", threads, "sweep", cfg.to_str().unwrap(), "--out", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(&first).unwrap();
    assert_eq!(a, fs::read(&second).unwrap());

    let manifest = format!("{}.manifest.json", first.display());
    let replayed = dir.path().join("c.csv");
    let out = run(&["--out", replayed.to_str().unwrap(), "replay", &manifest]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(a, fs::read(&replayed).unwrap());

    let reseeded = dir.path().join("d.csv");
    run(&["--seed", "7", "sweep", cfg.to_str().unwrap(), "--out", reseeded.to_str().unwrap()]);
    assert_ne!(a, fs::read(&reseeded).unwrap());
}

#[test]
fn analyze_agrees_with_the_first_sweep_realization() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["analyze", scenario("chain_node6.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    let energy = report["e_exact"].as_f64().unwrap();

    let text = fs::read_to_string(scenario("chain_sweep.json")).unwrap();
    let single = write(dir.path(), "one.json", &text.replace(r#""realizations": 100"#, r#""realizations": 1"#));
    let table = dir.path().join("one.json.out.json");
    let out = run(&["sweep", &single, "--out", table.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let rows: Value = serde_json::from_str(&fs::read_to_string(&table).unwrap()).unwrap();
    let row = rows
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["node"] == 6)
        .expect("node 6 row");
    let swept = row["E_exact_mean"].as_f64().unwrap();
    assert!((swept - energy).abs() < 1e-4 * energy, "{swept} vs {energy}");
}

#[test]
fn grid_toy_matrices() {
    let out = run(&[
        "-v",
        "grid",
        scenario("toy_grid.json").to_str().unwrap(),
        "--loads",
        "1",
        "--generators",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("A"));
    let report = stdout_json(&out);
    assert!(report["e_exact"].as_f64().unwrap() >= 0.0);
}

#[test]
fn gen_emits_a_loadable_graph() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let out = run(&["gen", "ba:20,2,5", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let g: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(g["n"], 20);
    assert_eq!(g["directed"], Value::Bool(false));
}
