//! End-to-end runs of the `spectral-stop` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spectral-stop"));
    cmd.env_remove("SPECTRAL_STOP_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn summaries(out: &Output) -> Vec<Value> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|line| serde_json::from_str(line).unwrap())
        .collect()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

/// Three dense communities of 12 nodes with a few links between them.
fn write_toy_graph(dir: &Path, name: &str) -> PathBuf {
    let mut text = String::from("# toy graph\n");
    for c in 0..3 {
        for i in 0..12 {
            for j in i + 1..12 {
                if (i * 7 + j * 3 + c) % 4 != 0 {
                    text.push_str(&format!("{}\t{}\n", 100 + 12 * c + i, 100 + 12 * c + j));
                }
            }
        }
    }
    text.push_str("100\t112\n112\t124\n105\t130\n");
    // A separate component that the loader must drop.
    text.push_str("900\t901\n");
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SYNTH_HEADER: [&str; 11] = [
    "t",
    "dist2",
    "dist2inf_proxy",
    "res2_max",
    "res2inf",
    "rate1",
    "rate2",
    "rate3",
    "rate_naive",
    "rate_noassumption",
    "C_assumption",
];

#[test]
fn synth_schema_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a");
    let args = ["synth", "--n", "120", "--r", "4", "--rho", "0.9", "--eps", "1e-5", "--seed", "7", "--out", path_str(&out)];
    let first = summaries(&run(&args));
    assert_eq!(first.len(), 1);
    let s = &first[0];
    for key in ["dataset", "mode", "epsilon", "t_stop", "t_comp", "t_naive", "ratio", "c_assumption"] {
        assert!(s.get(key).is_some(), "missing {key}");
    }
    let csv_path = PathBuf::from(s["csv"].as_str().unwrap());
    let (header, rows) = read_csv(&csv_path);
    assert_eq!(header, SYNTH_HEADER);
    assert_eq!(rows.len() as u64, s["t_stop"].as_u64().unwrap());
    let bytes = fs::read(&csv_path).unwrap();

    let second = summaries(&run(&args));
    assert_eq!(second, first);
    assert_eq!(fs::read(&csv_path).unwrap(), bytes);
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["synth", "--n", "60", "--r", "2", "--eps", "1e-4", "--out"];
    let with_flag = summaries(&run(&[&base[..], &[path_str(&dir.path().join("x")), "--seed", "11"]].concat()));
    let from_env = bin()
        .args([&base[..], &[path_str(&dir.path().join("y"))]].concat())
        .env("SPECTRAL_STOP_SEED", "11")
        .output()
        .unwrap();
    let from_env = summaries(&from_env);
    assert_eq!(with_flag[0]["t_stop"], from_env[0]["t_stop"]);
    assert_eq!(with_flag[0]["d0"], from_env[0]["d0"]);
    assert_eq!(from_env[0]["seed"], 11);
}

#[test]
fn saved_instance_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.bin");
    let a = summaries(&run(&[
        "synth", "--n", "80", "--r", "3", "--eps", "1e-6", "--p", "0", "--save-instance", path_str(&inst), "--out",
        path_str(&dir.path().join("a")),
    ]));
    let b = summaries(&run(&["synth", "--instance", path_str(&inst), "--eps", "1e-6", "--p", "0", "--out", path_str(&dir.path().join("b"))]));
    let csv_a = fs::read(a[0]["csv"].as_str().unwrap()).unwrap();
    let csv_b = fs::read(b[0]["csv"].as_str().unwrap()).unwrap();
    assert_eq!(csv_a, csv_b);
}

#[test]
fn floats_round_trip_with_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    let s = summaries(&run(&["synth", "--n", "50", "--r", "2", "--eps", "1e-3,3e-4", "--jobs", "2", "--out", path_str(dir.path())]));
    assert_eq!(s.len(), 2);
    assert_eq!(s[0]["epsilon"].as_f64().unwrap(), 1e-3);
    assert_eq!(s[1]["epsilon"].as_f64().unwrap(), 3e-4);
    let (_, rows) = read_csv(Path::new(s[0]["csv"].as_str().unwrap()));
    let digits = rows[0][1].split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(digits.len(), 17);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_str(dir.path());
    for args in [
        vec!["synth", "--n", "10", "--r", "2", "--eps=-1", "--out", out],
        vec!["synth", "--n", "10", "--r", "2", "--rho", "1.5", "--eps", "1e-3", "--out", out],
        vec!["synth", "--n", "10", "--eps", "1e-3", "--out", out],
        vec!["centrality", "--graph", "/nonexistent/graph.txt", "--eps", "1e-3", "--out", out],
        vec!["verify-assumption", "--out", out],
        vec!["nonsense"],
    ] {
        let output = run(&args);
        assert_eq!(output.status.code(), Some(2), "{args:?}");
        assert!(!output.stderr.is_empty());
    }
}

#[test]
fn malformed_edge_list_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "1 2\n3 x\n").unwrap();
    let output = run(&["centrality", "--graph", path_str(&path), "--eps", "1e-3", "--out", path_str(dir.path())]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains(":2:"));
}

#[test]
fn centrality_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_toy_graph(dir.path(), "toy.txt");
    let cache = dir.path().join("cache");
    let args = [
        "centrality", "--graph", path_str(&graph), "--eps", "1e-4", "--mode", "both", "--oracle", "--cache-dir",
        path_str(&cache), "--out", path_str(dir.path()),
    ];
    let s = summaries(&run(&args));
    let s = &s[0];
    assert_eq!(s["n"], 36);
    assert_eq!(s["nodes_raw"], 38);
    for key in ["t_comp", "t_naive", "ratio", "lambda1", "dist_tau"] {
        assert!(s[key].is_number(), "{key}");
    }
    let (header, rows) = read_csv(Path::new(s["csv"].as_str().unwrap()));
    assert_eq!(header.last().unwrap(), "dist_tau");
    assert!(rows.iter().all(|r| !r.last().unwrap().is_empty()));
    assert!(fs::read_dir(&cache).unwrap().count() == 1);
    // Second run reads the cached reference.
    assert_eq!(summaries(&run(&args))[0]["dist_tau"], s["dist_tau"]);
}

#[test]
fn cluster_uses_presets() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_toy_graph(dir.path(), "GemSec.txt");
    let s = summaries(&run(&["cluster", "--graph", path_str(&graph), "--eps", "1e-2", "--oracle", "--out", path_str(dir.path())]));
    assert_eq!(s[0]["r"], 12);
    assert_eq!(s[0]["rho"].as_f64().unwrap(), 1.0);
    assert!(s[0]["ncut_rel_diff"].is_number());

    let plain = write_toy_graph(dir.path(), "toy.txt");
    let s = summaries(&run(&["cluster", "--graph", path_str(&plain), "--r", "3", "--eps", "1e-2", "--out", path_str(dir.path())]));
    assert_eq!(s[0]["cluster_sizes"].as_array().unwrap().len(), 3);
    let output = run(&["cluster", "--graph", path_str(&plain), "--eps", "1e-2", "--out", path_str(dir.path())]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn sweep_profile_rows() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_toy_graph(dir.path(), "toy.txt");
    let s = summaries(&run(&["sweep", "--graph", path_str(&graph), "--eps", "1e-4", "--relaxed", "--out", path_str(dir.path())]));
    assert_eq!(s.len(), 2);
    assert_eq!(s[1]["variant"], "relaxed_l2");
    let expected_tol = 1e-4 * 36f64.sqrt();
    assert!((s[1]["epsilon"].as_f64().unwrap() - expected_tol).abs() < 1e-18);
    let (header, rows) = read_csv(Path::new(s[0]["csv"].as_str().unwrap()));
    assert_eq!(header, ["prefix_size", "conductance"]);
    assert_eq!(rows.len(), 35);
}

#[test]
fn verify_assumption_reports_constant() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_toy_graph(dir.path(), "toy.txt");
    let s = summaries(&run(&["verify-assumption", "--graph", path_str(&graph), "--tmax", "50", "--out", path_str(dir.path())]));
    let c = s[0]["c"].as_f64().unwrap();
    assert!(c > 0.0 && c.is_finite());
    let (_, rows) = read_csv(Path::new(s[0]["csv"].as_str().unwrap()));
    assert_eq!(rows.len(), 50);

    let s = summaries(&run(&["verify-assumption", "--n", "60", "--r", "3", "--tmax", "40", "--out", path_str(dir.path())]));
    let (_, rows) = read_csv(Path::new(s[0]["csv"].as_str().unwrap()));
    let first: f64 = rows[0][1].parse().unwrap();
    assert!(s[0]["c"].as_f64().unwrap() >= first);
}
