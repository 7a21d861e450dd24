use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gateopt::io::{load_instance, read_summary};
use gateopt::tabu::derive_seed;

fn gateopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gateopt")).args(args).output().expect("run gateopt")
}

fn ok(args: &[&str]) -> String {
    let out = gateopt(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    gateopt(args).status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn small_instance(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("i.json");
    ok(&["gen", "--seed", "1", "--flights", "10", "--gates", "3", "--out", p(&path)]);
    path
}

#[test]
fn gen_writes_valid_deterministic_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = small_instance(dir.path());
    let b = dir.path().join("again.json");
    ok(&["gen", "--seed", "1", "--flights", "10", "--gates", "3", "--out", p(&b)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(ok(&["validate", "--instance", p(&a)]).starts_with("ok"));
    assert_eq!(code(&["gen", "--flights", "0", "--out", p(&dir.path().join("z.json"))]), 2);
}

#[test]
fn solve_echoes_preset_weights() {
    let dir = tempfile::tempdir().unwrap();
    let inst = small_instance(dir.path());
    let out = ok(&["solve", "--instance", p(&inst), "--scenario", "5", "--seed", "3"]);
    assert!(out.contains("weights: (0.4, 0.4, 0.2)"), "{out}");
    let out = ok(&["solve", "--instance", p(&inst), "--scenario", "1"]);
    assert!(out.contains("weights: (1, 0, 0)"), "{out}");
    assert_eq!(code(&["solve", "--instance", p(&inst), "--weights", "0,0,0"]), 2);
    assert_eq!(code(&["solve", "--instance", p(&inst), "--scenario", "6"]), 2);
    assert_eq!(code(&["solve", "--instance", p(&inst)]), 2);
}

#[test]
fn bad_and_infeasible_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = small_instance(dir.path());
    let text = fs::read_to_string(&inst).unwrap();
    let truncated = dir.path().join("t.json");
    fs::write(&truncated, &text[..text.len() / 3]).unwrap();
    assert_eq!(code(&["solve", "--instance", p(&truncated), "--scenario", "1"]), 2);
    assert_eq!(code(&["validate", "--instance", p(&truncated)]), 2);

    // drop to one gate: ten turns cannot share it
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["gates"] = serde_json::json!([doc["gates"][0]]);
    doc["gate_dist"] = serde_json::json!([[0.0]]);
    let crowded = dir.path().join("c.json");
    fs::write(&crowded, doc.to_string()).unwrap();
    assert_eq!(code(&["solve", "--instance", p(&crowded), "--scenario", "1"]), 3);
}

#[test]
fn compare_matches_individual_solves() {
    let dir = tempfile::tempdir().unwrap();
    let inst = small_instance(dir.path());
    let report = dir.path().join("report");
    ok(&["compare", "--instance", p(&inst), "--scenarios", "1,2,3,4,5", "--seed", "9", "--out", p(&report)]);
    let (_, rows) = read_summary(report.join("summary.csv")).unwrap();
    assert_eq!(rows.len(), 5);

    for s in 1..=5u64 {
        let single = dir.path().join(format!("s{s}.json"));
        let seed = derive_seed(9, s).to_string();
        ok(&["solve", "--instance", p(&inst), "--scenario", &s.to_string(), "--seed", &seed, "--out", p(&single)]);
        assert_eq!(fs::read(&single).unwrap(), fs::read(report.join(format!("S{s}.json"))).unwrap(), "scenario {s}");
    }

    let with_base = dir.path().join("with_base");
    ok(&[
        "compare",
        "--instance",
        p(&inst),
        "--seed",
        "9",
        "--baseline",
        p(&dir.path().join("s1.json")),
        "--out",
        p(&with_base),
    ]);
    let (_, rows) = read_summary(with_base.join("summary.csv")).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[5][0], "baseline");

    let missing = dir.path().join("nope.json");
    assert_eq!(
        code(&["compare", "--instance", p(&inst), "--baseline", p(&missing), "--out", p(&dir.path().join("x"))]),
        2
    );
}

#[test]
fn calibrate_fits_and_applies() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["calibrate", "--dep-delay", "exp:1", "--arr-delay", "const:0", "--samples", "20000", "--seed", "4"];
    let first = ok(&args);
    assert_eq!(first, ok(&args));
    let b: f64 = first
        .lines()
        .find_map(|l| l.strip_prefix("b = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(b > 0.0 && b <= 1.0);
    // memoryless: conditional mean stays at 1 for every separation
    for line in first.lines().skip_while(|l| !l.starts_with("sep,")).skip(1) {
        let cols: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((cols[2] - 1.0).abs() < 0.05, "{line}");
    }

    assert_eq!(code(&["calibrate", "--dep-delay", "const:0", "--arr-delay", "const:0", "--samples", "100"]), 4);

    let inst = small_instance(dir.path());
    ok(&[
        "calibrate", "--dep-delay", "exp:0.5", "--arr-delay", "const:0", "--samples", "2000", "--apply", p(&inst),
    ]);
    let fit = load_instance(&inst).unwrap().params().conflict_fit;
    assert!((fit.b - (-0.5f64).exp()).abs() < 0.05, "{fit:?}");
}
