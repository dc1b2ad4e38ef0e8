use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn qcmrf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcmrf")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cliques_of_the_four_node_example() {
    let out = qcmrf(&["cliques", "--graph", path(&data("markov_example.json"))]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let mut cliques: Vec<Vec<String>> = serde_json::from_value(v["cliques"].clone()).unwrap();
    cliques.iter_mut().for_each(|c| c.sort());
    cliques.sort();
    assert_eq!(cliques, vec![vec!["A", "B", "C"], vec!["C", "D"]]);
}

#[test]
fn resources_report_all_three_models() {
    let out = qcmrf(&["resources", "--graph", path(&data("markov_example.json"))]);
    assert!(out.status.success());
    let v: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    let models: Vec<&str> = v.iter().map(|r| r["model"].as_str().unwrap()).collect();
    assert_eq!(models, ["qcibm", "qcmrf", "bbqc"]);
    // 6 pairs + 4 singles, and 9 Hamiltonian terms, each with 3n basis-change angles
    assert_eq!(v[0]["parameter_count"], 6 + 4 + 12);
    assert_eq!(v[1]["parameter_count"], 9 + 12);
}

#[test]
fn gen_benchmark_is_seed_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let dir = tmp.path().join(name);
        let out = qcmrf(&["gen-benchmark", "--graph", path(&data("loop4.json")), "--seed", seed, "--shots", "300", "--out", path(&dir)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (std::fs::read(dir.join("factors.json")).unwrap(), std::fs::read_to_string(dir.join("dataset.txt")).unwrap())
    };
    let a = run("a", "9");
    let b = run("b", "9");
    let c = run("c", "10");
    assert_eq!(a, b);
    assert_ne!(a.0, c.0);
    let lines: Vec<&str> = a.1.lines().collect();
    assert_eq!(lines.len(), 300);
    assert!(lines.iter().all(|l| l.len() == 4 && l.chars().all(|ch| ch == '0' || ch == '1')));
}

#[test]
fn train_writes_one_row_per_epoch() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qcmrf(&[
        "train", "--graph", path(&data("edge.json")), "--epochs", "3", "--shots", "0", "--model", "qcmrf", "--loss", "mmd",
        "--out", path(tmp.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = walk(tmp.path()).into_iter().find(|p| p.ends_with("qcmrf_mmd_0.csv")).unwrap();
    let text = std::fs::read_to_string(csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "epoch,loss,tv,wall_seconds");
    assert_eq!(rows.len(), 4);
    assert!(rows[3].starts_with("3,"));
    assert!(walk(tmp.path()).iter().any(|p| p.ends_with("summary.json")));
}

#[test]
fn sample_reproduces_a_point_mass() {
    // 3 zero Ising coefficients, then (Γ, Δ, Σ) per qubit; Δ = -π/4 maps |+> to |1>.
    let tmp = tempfile::tempdir().unwrap();
    let params = tmp.path().join("p.json");
    let d = -std::f64::consts::FRAC_PI_4;
    std::fs::write(&params, format!("[0, 0, 0, 0, {d}, 0, 0, {d}, 0]")).unwrap();
    let out = qcmrf(&["sample", "--graph", path(&data("edge.json")), "--model", "qcmrf", "--params", path(&params), "--shots", "500", "--seed", "1", "--out", path(tmp.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(tmp.path().join("samples.txt")).unwrap();
    assert_eq!(text.lines().count(), 500);
    assert!(text.lines().all(|l| l == "11"));
}

#[test]
fn wrong_parameter_length_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let params = tmp.path().join("p.json");
    std::fs::write(&params, "[0.1, 0.2]").unwrap();
    let out = qcmrf(&["sample", "--graph", path(&data("edge.json")), "--model", "qcmrf", "--params", path(&params), "--out", path(tmp.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn exit_codes() {
    assert_eq!(qcmrf(&["--help"]).status.code(), Some(0));
    assert_eq!(qcmrf(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(qcmrf(&["cliques"]).status.code(), Some(2));
    let missing = qcmrf(&["cliques", "--graph", "/definitely/not/here.json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/definitely/not/here.json"));
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}
