use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_bratteli");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn fixtures() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "bspec"))
        .collect();
    out.sort();
    out
}

fn run(args: &[&str], input: &Path) -> Output {
    Command::new(BIN).arg(args[0]).arg(input).args(&args[1..]).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn square_on_the_worked_example_verifies() {
    let out = run(&["square"], &fixture("xxy_z2.bspec"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["status"], "verified");
    assert_eq!(r["command"], "square");
    assert_eq!(r["result"]["quotient_size"], 10);
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
    assert!(r["tool_version"].as_str().unwrap().starts_with("bratteli "));
}

#[test]
fn refuted_loops_exit_one() {
    let out = run(&["loops", "--depth", "3"], &fixture("s3_odometer.bspec"));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["status"], "refuted");
}

#[test]
fn malformed_inputs_exit_two() {
    let empty = scratch("empty.bspec");
    std::fs::write(&empty, "").unwrap();
    let out = run(&["validate"], &empty);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    let bad = scratch("bad_order.bspec");
    std::fs::write(
        &bad,
        "levels 2\nvertices 1 1\nvertices 2 1\nedge 1 0 0\nedge 2 0 0\nedge 2 0 0\norder 2 0 0 0\n",
    )
    .unwrap();
    let out = run(&["validate"], &bad);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a permutation"));

    let unknown = scratch("unknown.bspec");
    std::fs::write(&unknown, "frobnicate 3\n").unwrap();
    assert_eq!(run(&["validate"], &unknown).status.code(), Some(2));

    assert_eq!(run(&["validate"], &scratch("missing.bspec")).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    for f in fixtures() {
        for cmd in ["validate", "simple", "emit-json", "skew"] {
            let a = run(&[cmd], &f);
            let b = run(&[cmd], &f);
            assert_eq!(a.status.code(), b.status.code());
            assert_eq!(a.stdout, b.stdout, "{cmd} {}", f.display());
        }
    }
}

#[test]
fn emitted_json_round_trips() {
    for f in fixtures() {
        let first = scratch("first.json");
        let second = scratch("second.json");
        let out = run(&["emit-json", "--out", first.to_str().unwrap()], &f);
        assert_eq!(out.status.code(), Some(0), "{}", f.display());
        let out = run(&["emit-json", "--out", second.to_str().unwrap()], &first);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let a: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
        let b: Value = serde_json::from_str(&std::fs::read_to_string(&second).unwrap()).unwrap();
        assert_eq!(a["result"], b["result"], "{}", f.display());

        let x = report(&run(&["validate"], &f));
        let y = report(&run(&["validate"], &first));
        assert_eq!(x["status"], y["status"]);
        assert_eq!(x["result"], y["result"]);
    }
}

#[test]
fn dot_output_has_one_cluster_per_level() {
    let out = run(&["emit-dot", "--level", "2"], &fixture("coboundary.bspec"));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("digraph"));
    for n in 0..=2 {
        assert!(text.contains(&format!("cluster_level_{n}")));
    }
    assert!(!text.contains("cluster_level_3"));
    assert!(text.contains("[rank=0, g=\"0\"]"));
}

#[test]
fn out_flag_writes_the_rendered_report() {
    let path = scratch("square.json");
    let out = run(&["square", "--out", path.to_str().unwrap()], &fixture("xxy_z2.bspec"));
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, run(&["square"], &fixture("xxy_z2.bspec")).stdout);
}
