use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphon-tiler"))
        .args(args)
        .current_dir(root())
        .env_remove("GRAPHON_TILER_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// `(command line, expected stdout)` pairs from the README's console blocks.
fn readme_examples() -> Vec<(String, String)> {
    let text = std::fs::read_to_string(root().join("README.md")).unwrap();
    let mut examples: Vec<(String, String)> = Vec::new();
    let mut in_console = false;
    for line in text.lines() {
        if line.starts_with("```") {
            in_console = line == "```console";
            continue;
        }
        if !in_console {
            continue;
        }
        if let Some(command) = line.strip_prefix("$ graphon-tiler ") {
            examples.push((command.to_string(), String::new()));
        } else if let Some((_, expected)) = examples.last_mut() {
            expected.push_str(line);
            expected.push('\n');
        }
    }
    examples
}

#[test]
fn readme_examples_match() {
    let examples = readme_examples();
    assert!(examples.len() >= 10);
    for (command, expected) in examples {
        let args: Vec<&str> = command.split_whitespace().collect();
        let out = run(&args);
        assert!(out.status.success(), "{command}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(stdout(&out), expected, "{command}");
    }
}

#[test]
fn exact_mode_prints_three_fifths() {
    let out = run(&["ftil", "--pattern", "C5", "--graph", "data/k3.json", "--exact"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["value"], serde_json::json!(0.6));
}

#[test]
fn input_errors_exit_with_one() {
    for args in [
        vec!["ftil", "--pattern", "C5", "--graph", "missing.json"],
        vec!["ftil", "--pattern", "C5", "--graph", "data/k3.json", "--unknown"],
        vec!["ftil", "--pattern", "Q9", "--graph", "data/k3.json"],
        vec!["graphon-til", "--pattern", "K2", "--spec", "triangle"],
        vec!["graphon-til", "--pattern", "K2", "--spec", "half", "--graphon", "data/flat.json"],
        vec!["sample", "--spec", "constant:p=2", "--n", "3"],
        vec!["sample", "--spec", "half", "--n", "0"],
        vec!["til-eps", "--pattern", "K2", "--graph", "data/c4.json", "--eps", "1.5"],
        vec!["nonsense"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn malformed_files_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n": 2, "edges": [[0, 2]]}"#).unwrap();
    let out = run(&["ftil", "--pattern", "K2", "--graph", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    std::fs::write(&bad, r#"{"measures": [0.5, 0.4], "values": [[0, 1], [1, 0]]}"#).unwrap();
    let out = run(&["graphon-til", "--pattern", "K2", "--graphon", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn guards_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("k30.json");
    let edges: Vec<[usize; 2]> = (0..30).flat_map(|u| (u + 1..30).map(move |v| [u, v])).collect();
    std::fs::write(&big, serde_json::json!({"n": 30, "edges": edges}).to_string()).unwrap();
    let out = run(&["til-eps", "--pattern", "K2", "--graph", big.to_str().unwrap(), "--eps", "0.01"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(&["til", "--pattern", "K2", "--graph", "data/c5.json", "--node-limit", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pattern_files_and_catalog_precedence() {
    let dir = tempfile::tempdir().unwrap();
    // A file named like a catalog entry is only used with an explicit path.
    let path = dir.path().join("K3");
    std::fs::write(&path, r#"{"n": 3, "edges": [[0, 1], [1, 2]]}"#).unwrap();
    let catalog = run(&["homs", "--pattern", "K3", "--graph", "data/k3.json"]);
    let file = run(&["homs", "--pattern", path.to_str().unwrap(), "--graph", "data/k3.json"]);
    assert!(stdout(&catalog).starts_with(r#"{"value":6,"#));
    assert!(stdout(&file).starts_with(r#"{"value":12,"#));
    let c4 = run(&["homs", "--pattern", "C4", "--graph", "data/k3.json", "--injective"]);
    assert!(stdout(&c4).starts_with(r#"{"value":0,"#));
}

#[test]
fn out_flag_and_seed_variable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let out = run(&["sample", "--spec", "half", "--n", "50", "--seed", "11", "--out", a.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());

    let out = Command::new(env!("CARGO_BIN_EXE_graphon-tiler"))
        .args(["sample", "--spec", "half", "--n", "50", "--out", b.to_str().unwrap()])
        .current_dir(root())
        .env("GRAPHON_TILER_SEED", "11")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let bad = Command::new(env!("CARGO_BIN_EXE_graphon-tiler"))
        .args(["sample", "--spec", "half", "--n", "5"])
        .env("GRAPHON_TILER_SEED", "minus one")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn experiment_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("gaps.csv");
    let out = run(&[
        "experiment", "--pattern", "K2", "--spec", "half", "--ns", "10,20", "--trials", "3", "--seed", "4",
        "--csv", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let table = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "n,trial,seed,ftil_over_n,target,abs_gap");
    assert_eq!(lines.len(), 7);
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["target"], serde_json::json!(0.25));
    assert_eq!(summary["target_m"], serde_json::json!(64));
    assert_eq!(summary["mean_abs_gap"].as_array().unwrap().len(), 2);
}

#[test]
fn duality_check_on_graph_and_spec() {
    for args in [
        vec!["duality-check", "--pattern", "P3", "--graph", "data/c5.json"],
        vec!["duality-check", "--pattern", "K2", "--spec", "bipartite:s=0.3,p=1", "--m", "10"],
    ] {
        let out = run(&args);
        assert!(out.status.success());
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert!(v["gap"].as_f64().unwrap() <= 1e-6, "{v}");
    }
}

#[test]
fn help_exits_with_zero() {
    assert!(run(&["--help"]).status.success());
    assert!(run(&["ftil", "--help"]).status.success());
}
