use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn kcycle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kcycle")).args(args).env_remove("KCYCLE_THREADS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn json(args: &[&str]) -> Value {
    let o = kcycle(args);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).expect("valid JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn no_arguments_is_a_usage_error() {
    assert_eq!(kcycle(&[]).status.code(), Some(2));
    assert_eq!(kcycle(&["renewal", "--k", "3"]).status.code(), Some(2));
    assert_eq!(kcycle(&["renewal", "--lengths", "1:x", "--k", "3"]).status.code(), Some(2));
}

#[test]
fn renewal_exact_value() {
    let v = json(&["renewal", "--lengths", "1:1,2:1", "--k", "1", "--variant", "without"]);
    assert_eq!(v["command"], "renewal");
    assert_eq!(v["result"]["exact"], "1/2");
    let v = json(&["renewal", "--lengths", "1:2,2:1", "--k", "2", "--oracle", "--mc-trials", "2000"]);
    assert_eq!(v["result"]["oracle_matches"], true);
}

#[test]
fn sum_check_approaches_ln_3() {
    let v = json(&["conditioning", "sum-check", "--T", "60"]);
    let x = v["result"]["float"].as_f64().unwrap();
    assert!((x - 3f64.ln()).abs() < 1e-12, "{x}");
}

#[test]
fn csv_has_provenance_header() {
    let o = kcycle(&["--seed", "9", "conditioning", "constants", "--I", "4", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let first = lines.next().unwrap();
    assert!(first.starts_with("# command=conditioning constants seed=9 version="), "{first}");
    assert_eq!(lines.next(), Some("i,lambda,delta,planted_mean"));
    assert_eq!(lines.next(), Some("1,1,-1,0"));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let args = ["--seed", "5", "census", "--n", "200", "--samples", "300", "--format", "csv"];
    let one = kcycle(&[&["--threads", "1"][..], &args].concat());
    let two = kcycle(&[&["--threads", "2"][..], &args].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, two.stdout);
    let embed = ["comb", "embed", "--n", "300", "--k", "10", "--p-mult", "6", "--seeds", "2", "--no-timing"];
    let a = kcycle(&[&["--threads", "1"][..], &embed].concat());
    let b = kcycle(&[&["--threads", "2"][..], &embed].concat());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sampled_graph_feeds_census_and_factor_count() {
    let path = scratch("petersen_like.txt");
    let o = kcycle(&["--seed", "3", "sample", "--model", "config", "--n", "12", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("# n=12 d=3"), "{text}");
    let o = kcycle(&["census", "--graph", path.to_str().unwrap(), "--max-length", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("i,X_i\n1,"));
    let v = json(&["factors", "count", "--graph", path.to_str().unwrap(), "--k", "4"]);
    assert!(v["result"]["cf"].is_u64());
}

#[test]
fn comb_embed_and_verify_round_trip() {
    let graph = scratch("k9.txt");
    let mut text = String::from("# n=9\n");
    for u in 0..9 {
        for v in u + 1..9 {
            text.push_str(&format!("{u} {v} 1\n"));
        }
    }
    std::fs::write(&graph, text).unwrap();
    let comb = scratch("k9_comb.json");
    let o = kcycle(&[
        "comb",
        "embed",
        "--graph",
        graph.to_str().unwrap(),
        "--k",
        "3",
        "--no-timing",
        "--comb-out",
        comb.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("seed,stage_reached,success,millis\n0,done,true,0\n"));
    let v = json(&["comb", "verify", "--graph", graph.to_str().unwrap(), "--comb", comb.to_str().unwrap()]);
    assert_eq!(v["result"]["valid"], true);

    let sparse = scratch("c9.txt");
    std::fs::write(&sparse, "# n=9\n0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 8\n8 0\n").unwrap();
    let o = kcycle(&["comb", "verify", "--graph", sparse.to_str().unwrap(), "--comb", comb.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = kcycle(&["comb", "embed", "--graph", sparse.to_str().unwrap(), "--k", "3", "--no-timing"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn series_json_lists_exact_coefficients() {
    let v = json(&["series", "--T", "6", "--kind", "step"]);
    let c = v["result"]["coefficients"].as_array().unwrap();
    assert_eq!(c.len(), 7);
    assert_eq!(c[2], "1/2");
    assert_eq!(c[3], "1/4");
}

#[test]
fn second_moment_matches_direct_enumeration() {
    let v = json(&["second-moment", "--n", "4", "--k", "4", "--verify-direct"]);
    assert_eq!(v["result"]["direct_agrees"], true);
}
