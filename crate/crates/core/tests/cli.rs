use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chiralflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn reports(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

#[test]
fn verify_n2_rank_two() {
    let out = run(&["verify", "n2", "--rank", "2", "--hmax", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = reports(&out);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["check"], "verify.n2");
    assert_eq!(r[0]["status"], "PASS");
    assert_eq!(r[0]["rank"], 2);
    assert_eq!(r[0]["window"]["hmax"], "3");
    assert!(r[0]["elapsed_ms"].is_u64());
    assert_eq!(r[0]["measured"]["conventions"].as_array().unwrap().len(), 2);
    assert!(r[0]["measured"]["tie_break"].as_str().unwrap().starts_with("unresolved"));
}

#[test]
fn constancy_passes() {
    let out = run(&["flow", "constancy", "--rank", "1", "--hmax", "2", "--kmax", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(reports(&out)[0]["status"], "PASS");
}

#[test]
fn ellipticity_passes() {
    let out = run(&["character", "ellipticity", "--rank", "1", "-n", "1", "--hmax", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(reports(&out)[0]["status"], "PASS");
    let out = run(&["character", "ellipticity", "--rank", "2", "-n", "-2", "--hmax", "3/2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn inverse_at_rank_one_fails_with_counterexample() {
    let out = run(&["flow", "inverse", "--hmax", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let r = &reports(&out)[0];
    assert_eq!(r["status"], "FAIL");
    assert_eq!(r["measured"]["tau_sigma"], "-1");
    assert!(r["counterexample"].as_str().unwrap().contains("got -1 |0>"));
}

#[test]
fn intertwine_reports_measured_signs() {
    let out = run(&["flow", "intertwine", "--rank", "2", "--hmax", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &reports(&out)[0];
    assert_eq!(r["measured"]["e"], -1);
    assert_eq!(r["measured"]["epsilon"], -1);
    assert_eq!(r["measured"]["sign_of_sigma_vac"], 1);
    assert_eq!(r["measured"]["agrees_with_stated_direction"], false);
}

#[test]
fn apply_and_ope_are_measurements() {
    let out = run(&["flow", "apply", "1 |0>", "--stable"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &reports(&out)[0];
    assert_eq!(r["status"], "MEASURED");
    assert_eq!(r["measured"]["output"], "-1 c[1,-1] |0>");

    let out = run(&["ope", "1 c[1,-1] |0>", "1 b[1,-1] |0>", "--text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("MEASURED ope rank=1"), "{}", text);
    assert!(text.contains("a_(0) b = 1 |0>"), "{}", text);
}

#[test]
fn trace_printout_is_byte_stable() {
    let args = ["character", "trace", "--rank", "2", "--hmax", "2", "--stable", "--text"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8_lossy(&a.stdout);
    assert!(text.contains("q^-1/4 y^0 : 1"), "{}", text);
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["verify", "everything"]).status.code(), Some(2));
    assert_eq!(run(&["flow", "constancy", "--kmax", "x"]).status.code(), Some(2));
    let out = run(&["flow", "apply", "1 c[2,-1] |0>"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("out of range for rank 1"));
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = ["verify", "omega", "--rank", "2", "--stable"];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_chiralflow"))
        .args(args)
        .env("CHIRALFLOW_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
}
