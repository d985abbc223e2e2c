use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eulercheck"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(p).unwrap()
}

fn shipped() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/dilcher_vignat.idn").to_string()
}

#[test]
fn euler_and_bernoulli_lists() {
    let o = bin(&["constants", "--euler", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "E_0 = 1\nE_2 = -1\nE_4 = 5\nE_6 = -61\nE_8 = 1385\n");
    let o = bin(&["constants", "--bernoulli", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "B_1 = 1/6\nB_2 = 1/30\nB_3 = 1/42\nB_4 = 1/30\nB_5 = 5/66\n");
}

#[test]
fn golden_reports() {
    let o = bin(&["check", "tests/golden/small.idn", "--digits", "20", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), golden("small.json"));
    let o = bin(&["check", "tests/golden/small.idn", "--digits", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("small.txt"));
}

#[test]
fn shipped_corpus_matches_expectations() {
    let path = shipped();
    let o = bin(&["check", &path, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for r in report["results"].as_array().unwrap() {
        let id = r["id"].as_str().unwrap();
        let want = match id {
            "eq2" | "eq3" | "eq11_as_printed" => "refuted",
            _ => "confirmed",
        };
        assert_eq!(r["verdict"], want, "{id} {}", r["param"]);
        assert!(r.get("ms").is_none());
    }
    assert_eq!(report["summary"]["mismatched"], 0);
    assert_eq!(report["summary"]["inconclusive"], 0);
    // byte-identical on a second run
    let again = bin(&["check", &path, "--format", "json"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn exit_codes() {
    let o = bin(&["check", "tests/golden/mismatch.idn"]);
    assert_eq!(o.status.code(), Some(1));
    let o = bin(&["check", "tests/golden/inconclusive.idn"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("no rigorous tail bound"));
    let o = bin(&["check", "tests/golden/inconclusive.idn", "--mode", "heuristic"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("confirmed*"));
}

#[test]
fn errors_exit_three_with_positions() {
    let o = bin(&["check", "tests/golden/broken.idn"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
    assert_eq!(
        stderr(&o).trim(),
        "error: tests/golden/broken.idn:8:15: syntax error: expected `)`, found `;`"
    );
    for args in [
        &["check", "tests/golden/does_not_exist.idn"][..],
        &["check", "tests/golden/small.idn", "--digits", "3"],
        &["check", "tests/golden/small.idn", "--only", "nope"],
        &["check", "tests/golden/small.idn", "--max-terms", "0"],
        &["check", "tests/golden/small.idn", "--format", "yaml"],
        &["check"],
        &["frobnicate"],
        &["eval", "1 +"],
        &["eval", "n^2", "--param", "n"],
        &["constants"],
    ] {
        let o = bin(args);
        assert_eq!(o.status.code(), Some(3), "{args:?}");
        assert!(!stderr(&o).is_empty(), "{args:?}");
    }
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn eval_expression() {
    let o = bin(&["eval", "pi*sqrt(2)/4", "--digits", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let (mid, rad) = out.trim().split_once(" ± ").unwrap();
    assert!(mid.starts_with("1.1107207345"));
    assert!(rad.parse::<f64>().unwrap() <= 1e-50);

    let o = bin(&["eval", "abs(euler(2*n))", "--param", "n=4"]);
    assert_eq!(stdout(&o), "1385 ± 0\n");
    let o = bin(&["eval", "k", "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("1:1"));

    let o = bin(&["eval", "sum(k, 1..inf, 1/k^2)", "--format", "json", "--digits", "20"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["mid"].as_str().unwrap().starts_with("1.6449340668482264"));
    assert_eq!(v["rigorous"], true);
}

#[test]
fn only_and_timings() {
    let o = bin(&["check", "tests/golden/small.idn", "--only", "wallis_like", "--timings", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    assert!(results[0]["ms"].is_u64());
}
