use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lubin-tate")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn fgroup_cyclotomic_is_multiplicative_group() {
    let v = run_json(&["fgroup", "--p", "2", "--f", "cyclotomic"]);
    let terms: Vec<(Vec<u64>, String)> = v["group_law"]["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            let exp = t["exp"].as_array().unwrap().iter().map(|e| e.as_u64().unwrap()).collect();
            (exp, t["coeff"].as_str().unwrap().to_string())
        })
        .collect();
    let one = "[1] + O(2^8)".to_string();
    assert_eq!(terms, vec![(vec![0, 1], one.clone()), (vec![1, 0], one.clone()), (vec![1, 1], one)]);
    assert_eq!(v["axioms"], true);
}

#[test]
fn fgroup_p3_golden() {
    let out = run(&["fgroup", "--p", "3", "--f", "3,0,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), include_str!("golden/fgroup_p3.json"));
}

#[test]
fn fgroup_rejects_composite_p() {
    let out = run(&["fgroup", "--p", "4"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("prime"));
}

#[test]
fn bad_polynomial_is_usage_error() {
    assert_eq!(run(&["fgroup", "--p", "3", "--f", "1,0,1"]).status.code(), Some(64));
    assert_eq!(run(&["fgroup", "--p", "3", "--f", "3,,1"]).status.code(), Some(64));
}

#[test]
fn verify_axioms_p3() {
    let v = run_json(&["verify", "--suite", "axioms", "--p", "3"]);
    assert_eq!(v["failed"], 0);
    assert!(v["passed"].as_u64().unwrap() >= 4);
}

#[test]
fn verify_all_p2_m3_under_a_minute() {
    let t = Instant::now();
    let v = run_json(&["verify", "--suite", "all", "--p", "2", "--m", "3"]);
    assert!(t.elapsed() < Duration::from_secs(60));
    assert_eq!(v["failed"], 0);
    let names: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    for want in ["axioms.associativity", "torsion.count.m3", "coleman.iterates.m3", "ramification.herbrand.m3", "artin.homomorphism.m3"] {
        assert!(names.contains(&want), "{want}");
    }
}

#[test]
fn unknown_suite_is_usage_error() {
    let out = run(&["verify", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("possible values"));
}

#[test]
fn starved_precision_exits_2() {
    let out = run(&["verify", "--p", "2", "--m", "3", "-N", "2", "--output", "tsv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn torsion_table_p2_m2() {
    let out = run(&["torsion", "table", "--p", "2", "--m", "2", "--output", "tsv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# lubin-tate torsion") && lines[0].contains("seed=0"));
    assert!(lines[1].starts_with("index\ta"));
    assert_eq!(lines.len() - 2, 4);
    assert!(lines[2].ends_with("\tinf"));
}

#[test]
fn ramify_zeta8_jumps() {
    let v = run_json(&["ramify", "--fixture", "zeta8"]);
    assert_eq!(v["jumps"], serde_json::json!([1, 3]));
    assert_eq!(v["upper_jumps"], serde_json::json!(["1", "2"]));
    assert_eq!(v["hasse_arf"], "pass");
    assert_eq!(v["i_table"], serde_json::json!([null, 2, 4, 2]));
}

#[test]
fn ramify_reads_file() {
    let path = std::env::temp_dir().join(format!("lt-ramify-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"p":2,"prec":8,"ext":["2","2","1"],"autos":[["0","1"],["254","255"]]}"#).unwrap();
    let v = run_json(&["ramify", "--input", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(v["jumps"], serde_json::json!([1]));
    assert_eq!(v["order"], 2);
}

#[test]
fn ramify_rejects_non_group() {
    let path = std::env::temp_dir().join(format!("lt-ramify-bad-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"p":2,"prec":8,"ext":["2","2","1"],"autos":[["0","1"],["2","255"]]}"#).unwrap();
    let out = run(&["ramify", "--input", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn artin_unit_acts_by_multiplication() {
    let v = run_json(&["artin", "--x", "5", "--p", "2", "--m", "3"]);
    assert_eq!(v["frobenius_exponent"], 0);
    let perm: Vec<(u64, u64)> = v["torsion_permutation"]
        .as_array()
        .unwrap()
        .iter()
        .map(|pair| (pair[0].as_u64().unwrap(), pair[1].as_u64().unwrap()))
        .collect();
    assert_eq!(perm, (0..8).map(|a| (a, 5 * a % 8)).collect::<Vec<_>>());
}

#[test]
fn artin_act_uniformizer() {
    let v = run_json(&["artin", "act", "--x", "[1]*p^1", "--level", "2", "--p", "3"]);
    assert_eq!(v["frobenius_exponent"], -1);
    let perm = v["torsion_permutation"].as_array().unwrap();
    assert_eq!(perm.len(), 9);
    assert!(perm.iter().all(|pair| pair[0] == pair[1]));
}

#[test]
fn coleman_report_holds() {
    let v = run_json(&["coleman", "--p", "2", "--m", "2"]);
    assert_eq!(v["congruences"], serde_json::json!([true, true]));
    assert_eq!(v["conjugate_product"], serde_json::json!([true, true]));
    assert_eq!(v["u"].as_array().unwrap().len(), 3);
    let explicit = run_json(&["coleman", "--p", "3", "--g", "1,1"]);
    assert_eq!(explicit["g"], serde_json::json!(["[1]", "[1]"]));
    assert_eq!(run(&["coleman", "--p", "3", "--g", "3,1"]).status.code(), Some(64));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["verify", "--suite", "norms", "--p", "3", "--m", "2", "--seed", "11"][..],
        &["coleman", "--p", "2", "--m", "2", "--seed", "5", "--output", "tsv"][..],
        &["artin", "--x", "3", "--p", "2", "--m", "2"][..],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout);
    }
}

#[test]
fn seed_changes_samples_and_is_reported() {
    let a = run_json(&["coleman", "--p", "3", "--seed", "1"]);
    let b = run_json(&["coleman", "--p", "3", "--seed", "2"]);
    assert_eq!(a["config"]["seed"], 1);
    assert_ne!(a["g"], b["g"]);
}

#[test]
fn config_file_overridden_by_flags() {
    let path = std::env::temp_dir().join(format!("lt-config-{}.toml", std::process::id()));
    std::fs::write(&path, "p = 3\nm = 2\nN = 10\nseed = 9\noutput = \"json\"\n").unwrap();
    let v = run_json(&["torsion", "--config", path.to_str().unwrap(), "--m", "1"]);
    let bad = run(&["torsion", "--config", path.to_str().unwrap(), "--n", "9"]);
    std::fs::remove_file(&path).ok();
    assert_eq!((v["config"]["p"].as_u64(), v["config"]["N"].as_u64(), v["config"]["m"].as_u64()), (Some(3), Some(10), Some(1)));
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(bad.status.code(), Some(64));
}

#[test]
fn char_p_torsion() {
    let out = run(&["torsion", "--char-p", "--p", "2", "--m", "2", "--output", "tsv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 6);
}
