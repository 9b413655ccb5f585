use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ergolab(args: &[&str], out_root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergolab"))
        .args(args)
        .env("ERGOLAB_OUT", out_root)
        .output()
        .expect("binary runs")
}

const ZERO_SUMS: &str = r#"{
  "name": "half",
  "system": {"kind": "rotation", "alpha": "rational:1/2"},
  "cocycle": {"kind": "step", "breakpoints": ["0", "0.5"], "values": [1, -1]},
  "detector": {"kind": "zero_sums", "n": 10, "start": "0"}
}"#;

#[test]
fn run_writes_results_under_env_root() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, ZERO_SUMS).unwrap();
    let root = dir.path().join("out");
    let o = ergolab(&["run", cfg.to_str().unwrap()], &root);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(root.join("half/results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    for f in ["config.json", "summary.json", "manifest.json"] {
        assert!(root.join("half").join(f).exists(), "{f}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("out");

    let bad = dir.path().join("bad.json");
    fs::write(&bad, ZERO_SUMS.replace("\"n\": 10", "\"n\": -10")).unwrap();
    assert_eq!(ergolab(&["run", bad.to_str().unwrap()], &root).status.code(), Some(1));
    assert_eq!(ergolab(&["validate", bad.to_str().unwrap()], &root).status.code(), Some(1));
    assert!(!root.exists());

    let budget = dir.path().join("budget.json");
    fs::write(
        &budget,
        r#"{
  "name": "budget",
  "system": {"kind": "special_flow",
             "base": {"kind": "rotation", "alpha": "preset:golden"},
             "roof": {"starts": ["0"], "heights": ["1"], "crossing_budget": 2}},
  "cocycle": {"kind": "phase_step", "breakpoints": ["0", "0.5"], "values": ["1", "-1"]},
  "detector": {"kind": "sigma_profile", "t_max": "10", "start": {"a": "0.1", "b": "0"}}
}"#,
    )
    .unwrap();
    assert_eq!(ergolab(&["run", budget.to_str().unwrap()], &root).status.code(), Some(3));
    assert!(root.join("budget/manifest.json").exists());
    assert!(!root.join("budget/results.csv").exists());

    let precision = dir.path().join("precision.json");
    fs::write(
        &precision,
        r#"{
  "name": "precision",
  "system": {"kind": "rotation", "alpha": "rational:1/2"},
  "cocycle": {"kind": "step", "breakpoints": ["0", "0.3"], "values": [7, -3]},
  "detector": {"kind": "zero_sums", "n": 10, "start": "0.3"}
}"#,
    )
    .unwrap();
    let o = ergolab(&["run", precision.to_str().unwrap()], &root);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = fs::read_to_string(root.join("precision/manifest.json")).unwrap();
    assert!(manifest.contains("\"error_step\": 0"), "{manifest}");
}

#[test]
fn presets_list_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let o = ergolab(&["presets", "--write", dir.path().to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let listing = String::from_utf8(o.stdout).unwrap();
    assert_eq!(listing.lines().count(), 8);
    for line in listing.lines() {
        let name = line.split_whitespace().next().unwrap();
        let path = dir.path().join(format!("{name}.json"));
        let v = ergolab(&["validate", path.to_str().unwrap()], dir.path());
        assert_eq!(v.status.code(), Some(0), "{name}");
    }
}

#[test]
fn preset_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for root in [&a, &b] {
        let o = ergolab(&["run", "preset:theorem-c-induced"], root);
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |r: &Path| fs::read(r.join("theorem-c-induced/results.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}
