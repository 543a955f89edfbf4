use std::path::Path;
use std::process::{Command, Output};

fn qadv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qadv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn export(instance: &str, dir: &Path) -> String {
    let path = dir.join(format!("{instance}.json"));
    let p = path.to_str().unwrap().to_string();
    let out = qadv(&["export", instance, "--out", &p]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn divergence_kinds_on_example1() {
    let dir = tempfile::tempdir().unwrap();
    let qq = export("example1", dir.path());
    let v = json(&qadv(&["divergence", "--pair", &qq, "--kind", "informed"]));
    assert!((v["value"].as_f64().unwrap() - 0.5324).abs() < 2e-3);
    assert_eq!(v["unit"], "nats");
    let v = json(&qadv(&["divergence", "--pair", &qq, "--kind", "inf"]));
    assert!(v["value"].as_f64().unwrap().abs() < 1e-6);

    let cq = export("example1-cq", dir.path());
    let v = json(&qadv(&["divergence", "--pair", &cq, "--kind", "cq-informed", "--bits"]));
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["unit"], "bits");
    let v = json(&qadv(&["divergence", "--pair", &cq, "--kind", "cq-pair"]));
    assert!(v["value"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn wrong_pair_kind_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let qq = export("example1", dir.path());
    let out = qadv(&["divergence", "--pair", &qq, "--kind", "cq-informed"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_files_exit_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"first": 1}"#).unwrap();
    let out = qadv(&["divergence", "--pair", bad.to_str().unwrap(), "--kind", "informed"]);
    assert_eq!(out.status.code(), Some(2));

    let state = dir.path().join("s.json");
    std::fs::write(&state, "[[[2,0],[0,0]],[[0,0],[0,0]]]").unwrap();
    let s = state.to_str().unwrap();
    let out = qadv(&["beta", "--rho", s, "--sigma", s, "--eps", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn beta_on_diagonal_states() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("r.json");
    let s = dir.path().join("s.json");
    std::fs::write(&r, "[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]").unwrap();
    std::fs::write(&s, "[[[0.9,0],[0,0]],[[0,0],[0.1,0]]]").unwrap();
    let v = json(&qadv(&[
        "beta",
        "--rho",
        r.to_str().unwrap(),
        "--sigma",
        s.to_str().unwrap(),
        "--eps",
        "0.3",
    ]));
    // Accept outcome 1 fully (P = .5, Q = .1), then 0.4 of outcome 0 (Q = .9 · .4).
    assert!((v["beta"].as_f64().unwrap() - 0.46).abs() < 1e-12);
}

#[test]
fn stein_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let pair = export("constant", dir.path());
    let csv = dir.path().join("rows.csv");
    let out = qadv(&[
        "stein",
        "--pair",
        &pair,
        "--setting",
        "informed",
        "--inputs",
        "iid",
        "--eps",
        "0.3",
        "--n",
        "1,16,256",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,epsilon,setting,inputs,beta,dh,exponent_estimate,target,gap");
    assert_eq!(lines.len(), 4);
    let last: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(last[0], "256");
    let estimate: f64 = last[6].parse().unwrap();
    assert!((estimate - 0.51083).abs() <= 0.06);
}

#[test]
fn stein_cap_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let pair = export("example1", dir.path());
    let out = qadv(&["stein", "--pair", &pair, "--setting", "informed", "--inputs", "general", "--n", "9"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn export_round_trips_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["example1", "example1-cq", "classical-eb", "constant"] {
        let p = export(name, dir.path());
        let first = std::fs::read_to_string(&p).unwrap();
        let stdout = qadv(&["export", name]);
        assert_eq!(String::from_utf8(stdout.stdout).unwrap(), first);
    }
    assert_eq!(qadv(&["export", "missing"]).status.code(), Some(2));
}

#[test]
fn verify_example1_passes() {
    let out = qadv(&["verify", "example1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("[PASS]")));
    assert_eq!(qadv(&["verify", "other"]).status.code(), Some(2));
}
