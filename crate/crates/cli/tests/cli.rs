use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

const LIOUVILLE: &str = r#"{
  "dim": 2,
  "coordinates": ["x1", "x2"],
  "tensors": {
    "g": { "variance": "dd", "symmetric": true, "entries": [["x1 - x2", "0"], ["0", "x2 - x1"]] },
    "L": { "variance": "ud", "entries": [["x1", "0"], ["0", "x2"]] }
  }
}"#;

const TWISTED: &str = r#"{
  "dim": 2,
  "coordinates": ["x1", "x2"],
  "tensors": { "L": { "variance": "ud", "entries": [["x2", "0"], ["0", "0"]] } }
}"#;

fn pencil(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pencil"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("PENCIL_THREADS", t),
        None => cmd.env_remove("PENCIL_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_passes_with_status_zero() {
    let dir = TempDir::new().unwrap();
    let doc = write(&dir, "lc.json", LIOUVILLE);
    let o = pencil(&["verify", doc.to_str().unwrap(), "--checks", "geodesic,chain:4", "--format", "json"], Some("2"));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"]["pass"], 2);
    assert_eq!(v["checks"][1]["id"], "chain:4");
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let doc = write(&dir, "lc.json", LIOUVILLE);
    let args = ["verify", doc.to_str().unwrap(), "--checks", "nijenhuis,curvature,flows:2,poisson", "--format", "json", "--seed", "3"];
    let a = pencil(&args, Some("1"));
    let b = pencil(&args, Some("4"));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn failing_check_exits_one_with_witness() {
    let dir = TempDir::new().unwrap();
    let doc = write(&dir, "tw.json", TWISTED);
    let o = pencil(&["verify", doc.to_str().unwrap(), "--checks", "nijenhuis"], None);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL nijenhuis") && out.contains("witness [1,1,2]: x2"), "{out}");
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\n  \"dim\": 2,\n  ]\n}");
    let o = pencil(&["verify", bad.to_str().unwrap(), "--checks", "geodesic"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3, column 3"));
    let doc = write(&dir, "lc.json", LIOUVILLE);
    assert_eq!(pencil(&["verify", doc.to_str().unwrap(), "--checks", "bogus"], None).status.code(), Some(2));
    assert_eq!(pencil(&["verify"], None).status.code(), Some(2));
    assert_eq!(pencil(&["verify", doc.to_str().unwrap()], Some("lots")).status.code(), Some(2));
}

#[test]
fn skip_only_exits_zero() {
    let dir = TempDir::new().unwrap();
    let doc = write(&dir, "lc.json", LIOUVILLE);
    let o = pencil(&["verify", doc.to_str().unwrap(), "--checks", "conify"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1 skipped"));
}

#[test]
fn corpus_run_single_member() {
    let o = pencil(&["corpus", "run", "--only", "LiouvilleLC(2)", "--format", "json"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["LiouvilleLC(2)"]["summary"]["fail"], 0);
    assert_eq!(pencil(&["corpus", "run", "--only", "Nope(2)"], None).status.code(), Some(2));
}

#[test]
fn sim_run_writes_manifest_and_csv() {
    let dir = TempDir::new().unwrap();
    let doc = write(&dir, "lc.json", LIOUVILLE);
    let csv = dir.path().join("traj.csv");
    let o = pencil(
        &["sim", "run", doc.to_str().unwrap(), "--flow", "A1", "--grid", "64", "--T", "0.2", "--csv", csv.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(m["scheme"], "rk4-central");
    assert_eq!(m["grid"]["cells"], 64);
    assert_eq!(m["drifts"].as_array().unwrap().len(), 2);
    let text = fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("time,cell,tau,u1,u2\n"));
    let bad = pencil(&["sim", "run", doc.to_str().unwrap(), "--dt", "1.0"], None);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("CFL"));
}
