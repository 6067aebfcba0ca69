use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const C4_LEVEL2: &str = r#"{"n":4,"table":[[1,2,3,0],[3,0,1,2],[1,2,3,0],[3,0,1,2]]}"#;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cyclesets"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn build_p2_level2_order_four() {
    let out = run(&["build", "--family", "p2-level2", "--p", "2", "--t", "1"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim_end(), C4_LEVEL2);
}

#[test]
fn every_family_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_temp(
        &dir,
        "spec.json",
        r#"{"p":2,"k":5,"level":3,"exponents":[5,3,1,0],"digit_functions":[[0,0,3,3,2,2,1,1],[0,2]]}"#,
    );
    let base = r#"{"n":2,"table":[[1,0],[1,0]]}"#;
    // α_{(i,j)}(s, t) = t + i on Z/2
    let alpha = r#"[[[[0,1],[0,1]],[[0,1],[0,1]]],[[[1,0],[1,0]],[[1,0],[1,0]]]]"#;
    let cocycle = write_temp(&dir, "cocycle.json", &format!(r#"{{"base":{base},"fiber":2,"alpha":{alpha}}}"#));
    let builds: Vec<Vec<&str>> = vec![
        vec!["--family", "trivial", "--m", "5"],
        vec!["--family", "p2-level2", "--p", "3", "--t", "2"],
        vec!["--family", "elementary-abelian", "--p", "3"],
        vec!["--family", "elementary-abelian", "--p", "3", "--alpha", "(0 2 1)"],
        vec!["--family", "prime-power", "--input", &spec],
        vec!["--family", "extension", "--input", &cocycle],
    ];
    for b in builds {
        let mut args = vec!["build"];
        args.extend(&b);
        let built = run(&args, None);
        assert_eq!(built.status.code(), Some(0), "{b:?}: {}", String::from_utf8_lossy(&built.stderr));
        let verified = run(&["verify"], Some(&stdout(&built)));
        assert_eq!(verified.status.code(), Some(0), "{b:?}");
        let report = json(&verified);
        assert_eq!(report["valid"], true);
        assert_eq!(report["indecomposable"], true, "{b:?}");
        assert_eq!(report["solution"]["involutive"], true);
        assert_eq!(report["solution"]["braid"], true);
    }
}

#[test]
fn verify_reports_invariants() {
    let out = run(&["verify"], Some(C4_LEVEL2));
    let v = json(&out);
    assert_eq!(v["mpl"], 2);
    assert_eq!(v["tower"], serde_json::json!([4, 2, 1]));
    assert_eq!(v["group_type"], "cyclic");
    assert_eq!(v["group_order"], 4);
}

#[test]
fn verify_rejects_a_corrupted_table() {
    let bad = r#"{"n":4,"table":[[1,2,3,0],[3,0,1,2],[1,2,3,0],[3,0,2,1]]}"#;
    let out = run(&["verify"], Some(bad));
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["valid"], false);
    let t = [[1, 2, 3, 0], [3, 0, 1, 2], [1, 2, 3, 0], [3, 0, 2, 1]];
    let violations = v["violations"].as_array().unwrap();
    assert!(!violations.is_empty());
    for w in violations {
        let (x, y, z) = (w["x"].as_u64().unwrap() as usize, w["y"].as_u64().unwrap() as usize, w["z"].as_u64().unwrap() as usize);
        assert_ne!(t[t[x][y]][t[x][z]], t[t[y][x]][t[y][z]]);
    }
    let non_bijective = run(&["verify"], Some("[[0,0],[1,0]]"));
    assert_eq!(non_bijective.status.code(), Some(1));
}

#[test]
fn classify_pq_and_prime_square() {
    let out = run(&["classify", "--p", "2", "--q", "3"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["classes"].as_array().unwrap().len(), 1);
    assert_eq!(v["classes"][0]["mpl"], 1);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["size", "constraint", "templates_searched", "classes"]);

    let out = run(&["classify", "--p", "3", "--k", "2"], None);
    assert_eq!(json(&out)["classes"].as_array().unwrap().len(), 3);
    assert_eq!(run(&["classify", "--p", "3"], None).status.code(), Some(2));
    assert_eq!(run(&["classify", "--p", "4", "--q", "3"], None).status.code(), Some(1));
}

#[test]
fn solution_round_trip_is_byte_exact() {
    let there = run(&["solution"], Some(C4_LEVEL2));
    assert_eq!(there.status.code(), Some(0));
    let s = json(&there);
    assert_eq!(s["lambda"][0], serde_json::json!([3, 0, 1, 2]));
    let back = run(&["solution", "--invert"], Some(&stdout(&there)));
    assert_eq!(back.status.code(), Some(0));
    assert_eq!(stdout(&back), format!("{C4_LEVEL2}\n"));
    let not_a_solution = r#"{"n":2,"lambda":[[1,0],[1,0]],"rho":[[0,1],[0,1]]}"#;
    assert_eq!(run(&["solution", "--invert"], Some(not_a_solution)).status.code(), Some(1));
}

#[test]
fn iso_finds_or_refuses() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_temp(&dir, "a.json", C4_LEVEL2);
    // the same table relabeled by 0->1, 1->0, 2->3, 3->2
    let b = write_temp(&dir, "b.json", r#"{"n":4,"table":[[1,2,3,0],[3,0,1,2],[1,2,3,0],[3,0,1,2]]}"#);
    let c = write_temp(&dir, "c.json", r#"{"n":4,"table":[[1,2,3,0],[1,2,3,0],[1,2,3,0],[1,2,3,0]]}"#);
    let out = run(&["iso", "-i", &a, "-i", &b], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["isomorphic"], true);
    let out = run(&["iso", "-i", &a, "-i", &c], None);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"], "non-isomorphic");
    assert_eq!(run(&["iso", "-i", &a], None).status.code(), Some(2));
}

#[test]
fn retract_prints_the_tower() {
    let v = json(&run(&["retract"], Some(C4_LEVEL2)));
    assert_eq!(v["sizes"], serde_json::json!([4, 2, 1]));
    assert_eq!(v["projections"][0], serde_json::json!([0, 1, 0, 1]));
    assert_eq!(v["tower"][1]["table"], serde_json::json!([[1, 0], [1, 0]]));
}

#[test]
fn enumerate_and_lemma2() {
    let v = json(&run(&["enumerate", "--n", "2", "--mode", "full"], None));
    assert_eq!(v["count"], 2);
    assert_eq!(v["structures"].as_array().unwrap().len(), 2);
    let v = json(&run(&["enumerate", "--n", "4", "--mode", "regular-abelian", "--count"], None));
    assert!(v.get("structures").is_none());
    let v = json(&run(&["enumerate", "--mode", "spec", "--p", "3", "--k", "2"], None));
    assert_eq!(v["count"], 2);
    let over = run(&["enumerate", "--n", "4", "--mode", "full", "--budget", "5"], None);
    assert_eq!(over.status.code(), Some(1));
    assert!(json(&over)["error"].as_str().unwrap().contains("budget"));
    let v = json(&run(&["lemma2", "--p", "3"], None));
    assert_eq!(v, serde_json::json!([[0, 1, 2], [0, 2, 1]]));
}

#[test]
fn pretty_and_output_file() {
    let out = run(&["build", "--family", "p2-level2", "--p", "2", "--t", "1", "--pretty"], None);
    let text = stdout(&out);
    assert!(text.contains("σ_0 = (0 1 2 3)"));
    assert!(text.contains("σ_1 = (0 3 2 1)"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = run(&["build", "--family", "trivial", "--m", "3", "-o", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "{\"n\":3,\"table\":[[1,2,0],[1,2,0],[1,2,0]]}\n");
}

#[test]
fn usage_and_io_errors() {
    assert_eq!(run(&["verify", "-i", "/nonexistent/table.json"], None).status.code(), Some(2));
    assert_eq!(run(&["verify"], Some("not json")).status.code(), Some(2));
    assert_eq!(run(&["build", "--family", "bogus"], None).status.code(), Some(2));
    assert_eq!(run(&["build", "--family", "trivial"], None).status.code(), Some(2));
    assert_eq!(run(&[], None).status.code(), Some(2));
    let bad_spec = r#"{"p":5,"k":2,"level":2,"exponents":[2,1,0],"digit_functions":[[0,1,3,2,4]]}"#;
    let out = run(&["build", "--family", "prime-power", "-i", "-"], Some(bad_spec));
    assert_eq!(out.status.code(), Some(1));
}
