use std::process::{Command, Output};

use serde_json::Value;

fn symlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symlab"))
        .args(args)
        .env_remove("SYMLAB_SEED")
        .output()
        .expect("spawn symlab")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn solve_default_grid_recovers_pq() {
    let out = symlab(&["solve", "--p", "3/10", "--grid-step", "1/20", "--grid", "-2..1"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["status"], "Optimal");
    let v = doc["variance"].as_f64().unwrap();
    assert!((v - 0.21).abs() < 1e-7, "variance {v}");
}

#[test]
fn solve_fair_coin_is_a_point_mass() {
    let out = symlab(&["solve", "--p", "1/2"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert!(doc["variance"].as_f64().unwrap().abs() < 1e-9);
    let atoms = doc["y_atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 1);
    assert_eq!(atoms[0]["num"], -1);
    assert_eq!(atoms[0]["den"], 2);
}

#[test]
fn certify_reports_bound() {
    let out = symlab(&["certify", "--p", "3/10", "--samples", "500"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert!((doc["bound"].as_f64().unwrap() - 0.21).abs() < 1e-12);
    assert_eq!(doc["applies"], true);
    assert!(doc["max_violation"].as_f64().unwrap() < 1e-9);
}

#[test]
fn verify_rho_is_flat() {
    let out = symlab(&["verify-rho", "--samples", "200"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["samples_checked"], 200);
    assert!(doc["max_oddness_violation"].is_number());
}

#[test]
fn all_headline_is_consistent() {
    let out = symlab(&["all", "--p", "3/10", "--paths", "1000", "--dt", "1e-3", "--samples", "200"]);
    assert!(out.status.success());
    let h = &json(&out)["headline"];
    let lp = h["lp_variance"].as_f64().unwrap();
    let bound = h["certificate_bound"].as_f64().unwrap();
    assert!(lp >= bound - 1e-9);
    assert!((h["simulated_e_tau"].as_f64().unwrap() - 0.21).abs() < 1e-9);
}

#[test]
fn all_fair_coin_has_no_bound() {
    let out = symlab(&["all", "--p", "1/2", "--paths", "200", "--dt", "1e-3", "--samples", "100"]);
    assert!(out.status.success());
    assert!(json(&out)["headline"]["certificate_bound"].is_null());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["ito", "--p", "3/10", "--paths", "500", "--dt", "1e-3", "--seed", "11"];
    let a = symlab(&args);
    let b = symlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_falls_back_to_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_symlab"));
        cmd.args(["embed", "--paths", "300"]).env_remove("SYMLAB_SEED");
        if let Some(s) = env {
            cmd.env("SYMLAB_SEED", s);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        cmd.output().unwrap().stdout
    };
    assert_eq!(run(Some("5"), None), run(None, Some("5")));
    assert_ne!(run(Some("5"), None), run(None, None));
}

#[test]
fn table_output() {
    let out = symlab(&["solve", "--output", "table"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("variance") && l.contains("0.21")));
}

#[test]
fn malformed_flags_exit_2() {
    for args in [
        &["solve", "--p", "0.3"][..],
        &["solve", "--p", "3/2"],
        &["solve", "--grid", "1..-1"],
        &["solve", "--grid-step", "0"],
        &["embed", "--dt", "0.5"],
        &["frobnicate"],
    ] {
        let out = symlab(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn infeasible_grid_exits_3() {
    let out = symlab(&["solve", "--p", "3/10", "--grid", "1..2"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "Infeasible");
}
