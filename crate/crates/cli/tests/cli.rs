use std::path::Path;
use std::process::{Command, Output};

fn chevcert(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chevcert"))
        .args(args)
        .env("CHEVCERT_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn certify_a2_67_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Output> = (0..3).map(|_| chevcert(dir.path(), &["certify", "A2", "67", "1"])).collect();
    for r in &runs {
        assert_eq!(r.status.code(), Some(0));
    }
    assert_eq!(runs[0].stdout, runs[1].stdout);
    assert_eq!(runs[1].stdout, runs[2].stdout);
    let v: serde_json::Value = serde_json::from_slice(&runs[0].stdout).unwrap();
    assert_eq!(v["lambda"], serde_json::json!([11, 13]));
    assert_eq!(v["base_index"], 1);
}

#[test]
fn exit_code_taxonomy() {
    let dir = tempfile::tempdir().unwrap();
    let o = chevcert(dir.path(), &["certify", "A1", "37", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("e_p=1 > e=0"));
    let o = chevcert(dir.path(), &["certify", "A1", "5", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("p ≤ 1+2N_1 = 7"));
    assert_eq!(chevcert(dir.path(), &["certify", "A1", "9", "0"]).status.code(), Some(2));
    assert_eq!(chevcert(dir.path(), &["root-data", "Q3"]).status.code(), Some(2));
    assert_eq!(chevcert(dir.path(), &["certify", "A2", "67"]).status.code(), Some(2));
    assert_eq!(chevcert(dir.path(), &["density", "0", "--bogus"]).status.code(), Some(2));
    assert_eq!(chevcert(dir.path(), &["check-lemma", "G2", "3"]).status.code(), Some(1));
}

#[test]
fn density_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = chevcert(dir.path(), &["density", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "point 0.6065\ncumulative_lower 0.3935\n");
}

#[test]
fn scan_populates_cache_once() {
    let dir = tempfile::tempdir().unwrap();
    let o = chevcert(dir.path(), &["scan-irregular", "5", "40", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("37\t1\t32\n"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("10 computed"));
    let again = chevcert(dir.path(), &["scan-irregular", "5", "40"]);
    assert!(String::from_utf8_lossy(&again.stderr).contains("0 computed, 10 cached"));
    assert_eq!(o.stdout, again.stdout);
    // --cache-dir overrides the environment
    let other = tempfile::tempdir().unwrap();
    chevcert(dir.path(), &["scan-irregular", "5", "13", "--cache-dir", other.path().to_str().unwrap()]);
    assert!(other.path().join("irregular-v1.jsonl").exists());
}

#[test]
fn root_data_and_struct_consts() {
    let dir = tempfile::tempdir().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&chevcert(dir.path(), &["root-data", "G2"]).stdout).unwrap();
    assert_eq!(v["type"], "G2");
    assert_eq!(v["roots"].as_array().unwrap().len(), 12);
    let csv = stdout(&chevcert(dir.path(), &["struct-consts", "A2"]));
    assert!(csv.starts_with("alpha,beta,N\n"));
}

#[test]
fn certificate_file_validates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let o = chevcert(dir.path(), &["certify", "G2", "53", "0", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = chevcert(dir.path(), &["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let tampered = std::fs::read_to_string(&path).unwrap().replacen("\"p\": 53", "\"p\": 59", 1);
    std::fs::write(&path, tampered).unwrap();
    assert_eq!(chevcert(dir.path(), &["validate", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn lemma_and_filtration_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = chevcert(dir.path(), &["check-lemma", "B2", "13", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], 5);
    let o = chevcert(dir.path(), &["simulate-filtration", "A1", "3", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["group_order"], 12 * 27 * 27);
    assert_eq!(v["phi_dims"], serde_json::json!([3, 3]));
    let o = chevcert(dir.path(), &["simulate-filtration", "A1", "5", "3", "--cap", "1000"]);
    assert_eq!(o.status.code(), Some(2));
    let o = chevcert(dir.path(), &["simulate-filtration", "A1", "5", "3", "--random", "2", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn select_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let v: serde_json::Value =
        serde_json::from_slice(&chevcert(dir.path(), &["select-cochar", "A2", "37", "1"]).stdout).unwrap();
    assert_eq!(v["lambda"], serde_json::json!([3, 5]));
    let o = chevcert(dir.path(), &["select-cochar", "A2", "7", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value =
        serde_json::from_slice(&chevcert(dir.path(), &["effective-bound", "A1,A1"]).stdout).unwrap();
    assert_eq!(v["c"], 13);
    assert_eq!(v["c_g"], "c_G from external reference, not computable here");
}
