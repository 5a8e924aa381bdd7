//! The `kenku` binary: exit codes, formats, determinism and golden comparison.

use std::path::PathBuf;
use std::process::{Command, Output};

use kenku::report::ObstructionReport;

fn kenku(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kenku"))
        .args(args)
        .env_remove("KENKU_ENUM_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    [env!("CARGO_MANIFEST_DIR"), "golden", name].iter().collect::<PathBuf>().display().to_string()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kenku-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn verify_passes_on_both_models() {
    let o = kenku(&["verify", "--model", "x0_32", "--p", "3", "--ext", "3", "--branch", "both"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("PASS"));
    let o = kenku(&["verify", "--model", "x0_24", "--p", "5", "--ext", "3"]);
    assert_eq!(o.status.code(), Some(0));
    for branch in ["omega", "omega_prime"] {
        assert_eq!(kenku(&["verify", "--branch", branch]).status.code(), Some(0), "{branch}");
    }
}

#[test]
fn golden_files_match() {
    let cases = [
        ("enumerate", "x0_32", "x0_32_f27_points.md"),
        ("twists", "x0_32", "x0_32_f27_twists.md"),
        ("graph", "x0_32", "x0_32_f27_graph.md"),
        ("enumerate", "x0_24", "x0_24_f125_points.md"),
        ("twists", "x0_24", "x0_24_f125_twists.md"),
    ];
    for (cmd, model, file) in cases {
        let o = kenku(&[cmd, "--model", model, "--expect", &golden(file)]);
        assert_eq!(o.status.code(), Some(0), "{cmd} {model}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn golden_mismatch_exits_1() {
    let tampered = std::fs::read_to_string(golden("x0_32_f27_twists.md")).unwrap().replace("Z/24", "Z/25");
    let path = temp_file("tampered.md", &tampered);
    let o = kenku(&["twists", "--expect", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mismatch"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify", "--p", "2"][..],
        &["verify", "--model", "x0_32", "--p", "2"],
        &["enumerate", "--model", "no_such_model"],
        &["enumerate", "--format", "dot"],
        &["enumerate", "--format", "yaml"],
        &["graph", "--branch", "omega_24"],
        &["verify", "--ext", "9"],
        &["twists", "--target", "0"],
    ] {
        assert_eq!(kenku(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn enumeration_budget_is_enforced() {
    let o = kenku(&["enumerate", "--model", "x0_24", "--budget", "100"]);
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_kenku"))
        .args(["enumerate", "--model", "x0_24"])
        .env("KENKU_ENUM_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    for args in [&["graph", "--model", "x0_24", "--format", "json"][..], &["verify", "--format", "dot"], &["cusps"]] {
        assert_eq!(stdout(&kenku(args)), stdout(&kenku(args)), "{args:?}");
    }
}

#[test]
fn csv_lists_every_point() {
    let o = kenku(&["enumerate", "--model", "x0_24", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 104);
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.starts_with('"')));
    assert!(text.contains("\"[0,1,1]\""));
}

#[test]
fn json_report_round_trips() {
    let o = kenku(&["verify", "--format", "json"]);
    let report: ObstructionReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report.p, 3);
    assert_eq!(report.degree, 3);
    assert_eq!(report.modulus, vec![1, 2, 0, 1]);
    assert_eq!(report.points.len(), 28);
    assert_eq!(report.branches.len(), 2);
    assert!(!report.assumption.is_empty());
    assert_eq!(serde_json::to_value(&report).unwrap(), serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap());
}

#[test]
fn dot_colours_every_vertex() {
    let text = stdout(&kenku(&["graph", "--format", "dot", "--branch", "omega"]));
    assert!(text.starts_with("graph") || text.contains("graph "));
    assert_eq!(text.matches("fillcolor=black").count(), 15);
    assert_eq!(text.matches("fillcolor=white").count(), 9);
    assert_eq!(text.matches(" -- ").count(), 12);
}

#[test]
fn cusps_and_torsion_commands() {
    let o = kenku(&["cusps", "--model", "x0_24"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("{±(1,3), ±(2,9)}, {±(2,3), ±(1,9)}"));
    let o = kenku(&["torsion", "--model", "x0_32", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("Z/4"));
    assert!(text.contains("(0,-4)"));
}

#[test]
fn models_load_from_a_file() {
    let builtin = include_str!("../models/builtin.toml");
    let second = builtin.rfind("[[model]]").unwrap();
    let single = &builtin[..second];
    let path = temp_file("x0_32.toml", single);
    let o = kenku(&["verify", "--model", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let both = temp_file("both.toml", builtin);
    assert_eq!(kenku(&["verify", "--model", both.to_str().unwrap()]).status.code(), Some(2));
    let broken = temp_file("broken.toml", &single.replace("sign = -1", "sign = 3"));
    assert_eq!(kenku(&["verify", "--model", broken.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn surviving_white_vertex_exits_1() {
    let o = kenku(&["verify", "--target", "16"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
    let o = kenku(&["verify", "--target", "16", "--format", "json"]);
    let report: ObstructionReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report.branches.iter().any(|b| !b.survivors.is_empty()));
}
