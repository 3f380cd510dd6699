use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn tautring4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tautring4")).args(args).env_remove("TAUTRING4_CATALOG").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_tmp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tautring4-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const GENUS_TWO_KAPPA: &str = r#"{"ambient":[2,[]],"terms":[
  {"coeff":"60","class":"kappa2"},{"coeff":"-1","class":"delta_F"},{"coeff":"-6","class":"delta_H(0,{})"}]}"#;

#[test]
fn genus_two_has_two_divisors() {
    let o = tautring4(&["graphs", "--genus", "2", "--codim", "1", "--format", "json"]);
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 2);
    for l in lines {
        let v: Value = serde_json::from_str(&l).unwrap();
        assert!(v.get("v").is_some() && v.get("e").is_some());
    }
}

#[test]
fn kappa_two_relation_reduces_to_zero() {
    let f = write_tmp("k60.json", GENUS_TWO_KAPPA);
    let o = tautring4(&["--format", "json", "reduce", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let vector = v["vector"].as_array().unwrap();
    assert!(!vector.is_empty());
    assert!(vector.iter().all(|x| x == "0"));
}

#[test]
fn residual_outside_the_catalog_exits_two() {
    let f = write_tmp("k.json", r#"{"ambient":[2,[]],"terms":[{"coeff":"1","class":"kappa2"}]}"#);
    let empty = write_tmp("empty.json", r#"{"version":1,"relations":[]}"#);
    let o = tautring4(&["--catalog", empty.to_str().unwrap(), "reduce", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = tautring4(&["reduce", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).split_whitespace().collect::<Vec<_>>(), ["1/60", "delta_F", "1/10", "delta_H(0,{})"]);
}

#[test]
fn errors_exit_one() {
    assert_eq!(tautring4(&["graphs", "--genus", "0", "--markings", "a,b"]).status.code(), Some(1));
    let bad = write_tmp("bad.json", "{not json");
    assert_eq!(tautring4(&["normalize", bad.to_str().unwrap()]).status.code(), Some(1));
    let degree_one = write_tmp("d1.json", r#"{"ambient":[2,[]],"terms":[{"coeff":"1","class":"kappa1"}]}"#);
    assert_eq!(tautring4(&["reduce", degree_one.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn normalize_is_idempotent_and_deterministic() {
    let f = write_tmp("n.json", GENUS_TWO_KAPPA);
    let once = tautring4(&["--format", "json", "normalize", f.to_str().unwrap()]);
    assert!(once.status.success());
    let g = write_tmp("n2.json", &stdout(&once));
    let twice = tautring4(&["--format", "json", "normalize", g.to_str().unwrap()]);
    assert_eq!(stdout(&once), stdout(&twice));
    assert_eq!(stdout(&once), stdout(&tautring4(&["--format", "json", "normalize", f.to_str().unwrap()])));
}

#[test]
fn forgetting_a_point_from_kappa_two() {
    let f = write_tmp("k2.json", r#"{"ambient":[2,[]],"terms":[{"coeff":"1","class":"kappa2"}]}"#);
    let o = tautring4(&["pull", "--forget", "x", f.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "(-1) psi_x^2 + (1) kappa2");
}

#[test]
fn automorphisms_of_a_graph_file() {
    let f = write_tmp("f.json", "{\"v\":[0],\"e\":[[0,0],[0,0]],\"legs\":{}}\n");
    let o = tautring4(&["--format", "json", "aut", f.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["aut"], 8);
}

#[test]
fn rank_report_dumps_triplets() {
    let dump = write_tmp("m.txt", "");
    let o = tautring4(&["--format", "json", "rank-report", "--genus", "0", "--markings", "1,2,3,4,5,6", "--dump", dump.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["injective"], true);
    let text = std::fs::read_to_string(&dump).unwrap();
    assert!(!text.is_empty());
    for line in text.lines() {
        let inner = line.strip_prefix('(').and_then(|l| l.strip_suffix(')')).unwrap();
        let parts: Vec<&str> = inner.split(", ").collect();
        assert_eq!(parts.len(), 3);
        parts[0].parse::<usize>().unwrap();
        parts[1].parse::<usize>().unwrap();
        assert!(parts[2].starts_with('"') && parts[2].ends_with('"'));
    }
}

#[test]
fn verify_runs_a_single_check() {
    let o = tautring4(&["verify", "--suite", "paper", "--check", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("[PASS] 1 "));
    assert_eq!(tautring4(&["verify", "--suite", "paper", "--check", "7"]).status.code(), Some(1));
    assert_eq!(tautring4(&["verify", "--suite", "other"]).status.code(), Some(1));
}

#[test]
fn projection_to_the_middle_tensor() {
    for class in ["psi|delta(3,{})", "delta(3,{})|psi"] {
        let f = write_tmp("p.json", &format!(r#"{{"ambient":[7,[]],"terms":[{{"coeff":"1","class":"{class}"}}]}}"#));
        let o = tautring4(&["project", "--factor", "3:", f.to_str().unwrap()]);
        assert!(o.status.success());
        assert!(stdout(&o).contains("(-1) psi_@s (x) psi_@t"), "{class}: {}", stdout(&o));
    }
    for class in ["kappa2", "delta_E(2,{})"] {
        let f = write_tmp("z.json", &format!(r#"{{"ambient":[7,[]],"terms":[{{"coeff":"1","class":"{class}"}}]}}"#));
        assert_eq!(stdout(&tautring4(&["project", "--factor", "3:", f.to_str().unwrap()])).trim(), "0");
    }
}
