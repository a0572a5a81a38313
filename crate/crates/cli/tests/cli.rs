use std::collections::BTreeSet;
use std::process::{Command, Output};

use htheta::json::spec_from_json;
use htheta::relation::VerificationReport;
use serde_json::{json, Value};

fn htheta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_htheta")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

// Q(√−2), T = 2/3 − δ/3, for which the two character pairings disagree
fn counterexample_spec() -> String {
    json!({
        "d": 2, "g": 1, "h": 1,
        "T": [["2/3-1/3*delta"]],
        "P": {"rational": [[1]]},
        "A0": [["1/3+1/4*delta"]],
        "B0": [["1/5"]],
    })
    .to_string()
}

#[test]
fn eval_gaussian_rank_one_at_i() {
    let out = htheta(&["eval", "--W", "[0, 1]"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    // ϑ00(i)² = π/Γ(3/4)⁴
    assert!((v["re"].as_f64().unwrap() - 1.180_340_599_016_096).abs() < 1e-12);
    assert!(v["im"].as_f64().unwrap().abs() < 1e-15);
    assert!(v["tail"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn eval_outside_the_domain_exits_2() {
    let out = htheta(&["eval", "--W", "[0, -1]"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("lambda_min(Y)"), "{}", stderr(&out));
}

#[test]
fn unattainable_tail_exits_3() {
    let out = htheta(&["eval", "--W", "[0, 1]", "--eps", "1e-30", "--max-radius", "4"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn parse_errors_exit_1() {
    for args in [
        vec!["eval", "--W", "[0, 1"],
        vec!["verify", "--preset", "cubic"],
        vec!["frobnicate"],
        vec!["eval", "--W", "[0, 1]", "--eps", "-1"],
        vec!["groups", "--spec", "{\"d\": 1}"],
    ] {
        assert_eq!(code(&htheta(&args)), 1, "{args:?}");
    }
}

#[test]
fn eval_riemann_kind() {
    let spec = json!({"kind": "riemann", "a": ["1/2"], "b": ["1/2"]}).to_string();
    let out = htheta(&["eval", "--spec", &spec, "--W", "[0.3, 1.1]"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!((v["re"].as_f64(), v["im"].as_f64()), (Some(0.0), Some(0.0)));
}

#[test]
fn groups_of_presets() {
    let cubic = stdout_json(&htheta(&["groups", "--preset", "cubic_d3", "--g", "1"]));
    assert_eq!(cubic["G1"]["order"], 27);
    assert_eq!(cubic["G1"]["invariant_factors"], json!([3, 3, 3]));
    assert_eq!(cubic["G2"]["order"], 1);
    let mats = stdout_json(&htheta(&["groups", "--preset", "matsumoto", "--g", "2"]));
    assert_eq!((mats["G1"]["order"].as_u64(), mats["G2"]["order"].as_u64()), (Some(4), Some(4)));
    let id = stdout_json(&htheta(&["groups", "--spec", r#"{"d": 7, "g": 2, "T": [[1, 0], [0, 1]]}"#]));
    assert_eq!((id["G1"]["order"].as_u64(), id["G2"]["order"].as_u64()), (Some(1), Some(1)));
}

#[test]
fn groups_listing_is_capped() {
    let v = stdout_json(&htheta(&["groups", "--preset", "cubic_d3", "--g", "1", "--list", "5"]));
    assert_eq!(v["G1"]["representatives"].as_array().unwrap().len(), 5);
    assert_eq!(v["G1"]["listed"], 5);
}

#[test]
fn groups_errors() {
    assert_eq!(code(&htheta(&["groups", "--spec", r#"{"d": 1, "T": [[1, 2], [2, 4]]}"#])), 2);
    let out = htheta(&["groups", "--spec", r#"{"d": 1, "T": [[10, 0], [0, 10]]}"#, "--cap", "10"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn verify_cubic_preset() {
    let out = htheta(&["verify", "--preset", "cubic_d3", "--g", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["pass"], true);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 3);
    for r in records {
        assert!(r["report"]["residual_rel"].as_f64().unwrap() < 1e-9);
        assert_eq!(r["order_g1"], 27);
    }
}

#[test]
fn corrupted_phase_exits_5() {
    let out = htheta(&["verify", "--preset", "cubic_d3", "--g", "1", "--corrupt-phase", "1"]);
    assert_eq!(code(&out), 5);
    let v = stdout_json(&out);
    assert_eq!(v["pass"], false);
    assert!(v["records"][0]["report"]["residual_rel"].as_f64().unwrap() > 0.1);
}

#[test]
fn pairing_flag_selects_the_character() {
    let spec = counterexample_spec();
    assert_eq!(code(&htheta(&["verify", "--spec", &spec])), 5);
    let out = htheta(&["verify", "--spec", &spec, "--pairing", "dual", "--W", "[[[0.2, 1.3]]]"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["records"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_report_round_trips() {
    let out = htheta(&["verify", "--preset", "matsumoto", "--g", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for r in stdout_json(&out)["records"].as_array().unwrap() {
        let parsed: VerificationReport = serde_json::from_value(r["report"].clone()).unwrap();
        assert_eq!(serde_json::to_value(&parsed).unwrap(), r["report"]);
    }
}

#[test]
fn build_lists_terms() {
    let out = htheta(&["build", "--preset", "matsumoto", "--g", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["term_count"], 4);
    assert_eq!(v["terms"].as_array().unwrap().len(), 4);
    let spec = spec_from_json(&v["spec"]).unwrap();
    assert_eq!(spec_from_json(&htheta::json::spec_to_json(&spec)).unwrap().t, spec.t);
    assert_eq!(v["pairing"], "printed");
}

#[test]
fn build_from_spec_file() {
    let path = std::env::temp_dir().join(format!("htheta-spec-{}.json", std::process::id()));
    std::fs::write(&path, counterexample_spec()).unwrap();
    let out = htheta(&["build", "--spec", path.to_str().unwrap(), "--out", "csv"]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("a_index,b_index,phase\n"));
    // |G1| = 3, |G2| = 2
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn decompose_rational_p() {
    let spec = json!({"d": 3, "P": [["2", "-1"], ["-1", "2"]], "A0": [["1/3", "1/2*delta"]], "B0": [["1/4", "0"]]});
    let out = htheta(&["decompose", "--spec", &spec.to_string()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["lambdas"], json!([[3, 2], [2, 1]]));
    assert_eq!(v["det"], json!([3, 1]));
    assert!(v["residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["pairing"], "dual");
}

#[test]
fn suite_is_independent_of_threads() {
    let args = |t: &'static str| vec!["suite", "--preset", "cubic_d3", "--preset", "matsumoto", "--threads", t];
    let one = htheta(&args("1"));
    let four = htheta(&args("4"));
    assert_eq!(code(&one), 0, "{}", stderr(&one));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn suite_all_covers_every_family() {
    let out = htheta(&["suite", "--all"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["failed"], 0);
    let families: BTreeSet<&str> =
        v["records"].as_array().unwrap().iter().map(|r| r["preset"].as_str().unwrap()).collect();
    assert_eq!(families.len(), 13);
    let csv = htheta(&["suite", "--preset", "jacobi_identity", "--out", "csv"]);
    assert!(String::from_utf8(csv.stdout).unwrap().starts_with("preset,g,d,order_G1,residual_rel,seconds\n"));
}
