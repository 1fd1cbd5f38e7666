use std::path::PathBuf;
use std::process::{Command, Output};

fn tricon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tricon")).args(args).output().expect("spawn tricon")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tricon-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_prints_plan() {
    let out = stdout(&tricon(&["solve", "--problem", "A,B,Ma", "--strategy", "linear"]));
    assert!(out.contains("Solved, length 1"), "{out}");
    assert!(out.contains("-> C"), "{out}");
}

#[test]
fn solve_json_reports_no_plan() {
    let out = stdout(&tricon(&["solve", "--problem", "A,G,Ma", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["outcome"], "no_plan");
    assert!(v[0]["plan"].is_null());
}

#[test]
fn unknown_point_fails() {
    let o = tricon(&["solve", "--problem", "A,G,Q"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Q"));
}

#[test]
fn derive_then_solve_and_verify() {
    let dir = scratch("verify");
    let d = dir.to_str().unwrap();
    stdout(&tricon(&["derive", "--out", d]));
    let kb = dir.join("kb.json");
    let kb = kb.to_str().unwrap();
    stdout(&tricon(&["solve", "--problem", "Ma,Mb,Mc", "--kb", kb, "--out", d]));
    let plan = dir.join("Ma_Mb_Mc_minimization.plan");
    let text = std::fs::read_to_string(&plan).unwrap();
    assert_eq!(text.lines().count(), 3);

    let ok = tricon(&["verify", "--problem", "Ma,Mb,Mc", "--plan", plan.to_str().unwrap(), "--kb", kb]);
    assert!(stdout(&ok).contains("\"accepted\""));

    let bad = dir.join("bad.plan");
    std::fs::write(&bad, "RatioPoint4(Ma, Mb, Mc) -> H\n").unwrap();
    let o = tricon(&["verify", "--problem", "Ma,Mb,Mc", "--plan", bad.to_str().unwrap(), "--kb", kb]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("\"rejected\""));
}

#[test]
fn emit_writes_model_and_data() {
    let dir = scratch("emit");
    let out = stdout(&tricon(&["emit", "--problem", "A,G,O", "--max-steps", "6", "--out", dir.to_str().unwrap()]));
    assert_eq!(out.lines().count(), 2);
    let model = std::fs::read_to_string(dir.join("A_G_O.mzn")).unwrap();
    assert!(model.contains("int: n = 6;"));
    assert!(model.contains("known_points[0] = { A, G, O }"));
    assert!(!model.contains('\r'));
    assert!(dir.join("A_G_O.dzn").exists());
}

#[test]
fn bench_writes_reports() {
    let dir = scratch("bench");
    let problems = dir.join("problems.csv");
    std::fs::write(&problems, "id,a,b,c,status\nT1,A,B,Ma,solvable\nT2,A,G,O,solvable\n").unwrap();
    let out = stdout(&tricon(&[
        "bench",
        "--problems",
        problems.to_str().unwrap(),
        "--strategy",
        "all",
        "--out",
        dir.to_str().unwrap(),
    ]));
    assert!(out.starts_with("strategy,runs,solved"));
    assert_eq!(out.lines().count(), 4);
    for f in ["rows.csv", "summary.csv", "survival.csv", "lengths.csv", "report.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let lengths = std::fs::read_to_string(dir.join("lengths.csv")).unwrap();
    assert!(lengths.contains("T1,1,1,1"), "{lengths}");
}
