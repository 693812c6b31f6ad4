use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> (Value, i32, String) {
    let Output { stdout, stderr, status } = Command::new(env!("CARGO_BIN_EXE_lagflop"))
        .args(args)
        .current_dir(data(""))
        .output()
        .expect("binary runs");
    let text = String::from_utf8(stdout).expect("utf8 stdout");
    let report: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("stdout is not one JSON document ({e}): {text}"));
    (report, status.code().expect("exit code"), String::from_utf8_lossy(&stderr).into_owned())
}

fn strip_timing(mut v: Value) -> Value {
    v.as_object_mut().expect("report object").remove("duration_ms");
    v
}

/// Compares against `tests/golden/NAME.json`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, args: &[&str]) {
    let (report, code, _) = run(args);
    assert_eq!(code, 0, "{name}: {report}");
    let got = strip_timing(report);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
        return;
    }
    let want: Value = serde_json::from_str(&std::fs::read_to_string(&path).expect("golden file")).unwrap();
    assert_eq!(got, want, "{name} drifted from its golden file");
}

#[test]
fn golden_pluecker_cubic() {
    golden("pluecker_cubic", &["pluecker", "--d", "3", "--delta", "0", "--kappa", "0"]);
}

#[test]
fn golden_pluecker_with_identity() {
    golden(
        "pluecker_identity",
        &["pluecker", "--d", "3", "--dual-d", "6", "--dual-delta", "0", "--dual-kappa", "9"],
    );
}

#[test]
fn golden_dual_conic() {
    golden("dual_conic", &["dual", "--poly", "conic.txt", "--bidual"]);
}

#[test]
fn golden_symplin() {
    golden("symplin_reduce", &["symplin", "reduce", "--subspace", "coisotropic.json"]);
    golden(
        "symplin_project",
        &["symplin", "project", "--lagrangian", "lagrangian.json", "--coisotropic", "coisotropic.json"],
    );
}

#[test]
fn golden_lag() {
    golden("lag_check", &["lag", "check", "--table", "table_n2.json"]);
    golden("lag_transform", &["lag", "transform", "--table", "table_n1.json"]);
    golden("lag_reflect", &["lag", "reflect", "--gram", "a2.json", "--p", "1,0", "--c", "0,1"]);
}

#[test]
fn golden_charclass() {
    golden("ahat_square", &["charclass", "identity", "--kind", "ahat-square", "--rank", "2", "--degree", "4"]);
}

#[test]
fn pluecker_cubic_values() {
    let (r, code, stderr) = run(&["pluecker", "--d", "3", "--delta", "0", "--kappa", "0"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["d_dual"], 6);
    assert_eq!(r["results"]["kappa_dual"], 9);
    assert_eq!(r["seed"], 0);
    assert!(stderr.contains("PASS"));
}

#[test]
fn dual_conic_is_the_expected_conic() {
    let (r, code, _) = run(&["dual", "--poly", "conic.txt"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["dual_poly"], "4*x0*x2 - x1^2");
    assert_eq!(r["results"]["dual_degree"], 2);
}

#[test]
fn numeric_commands_pass() {
    for args in [
        &["hk", "flop-check", "--n", "2", "--samples", "10"][..],
        &["hk", "calabi-check", "--n", "1", "--samples", "10"],
        &["hk", "conormal", "--poly", "fermat_cubic.txt", "--samples", "5"],
        &["hk", "conormal", "--poly", "quadric4.txt", "--samples", "5"],
        &["legendre", "eval", "--poly", "fermat_cubic.txt", "--xi", "1,2,0.5"],
        &["legendre", "eval", "--poly", "fermat_cubic.txt", "--x", "1,2-i,0.5"],
    ] {
        let (r, code, _) = run(args);
        assert_eq!(code, 0, "{args:?}: {r}");
        assert_eq!(r["pass"], true);
    }
}

#[test]
fn seed_is_echoed() {
    let (r, _, _) = run(&["hk", "flop-check", "--n", "1", "--samples", "3", "--seed", "42"]);
    assert_eq!(r["seed"], 42);
}

#[test]
fn json_only_silences_stderr() {
    let (_, code, stderr) = run(&["pluecker", "--d", "4", "--json-only"]);
    assert_eq!(code, 0);
    assert!(stderr.is_empty());
}

#[test]
fn input_errors_exit_two_with_a_report() {
    for args in [
        &["dual", "--poly", "missing.txt"][..],
        &["pluecker", "--d", "1"],
        &["lag", "reflect", "--gram", "a2.json", "--p", "1,x", "--c", "0,1"],
        &["verify", "all", "--mutate", "nothing"],
    ] {
        let (r, code, _) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert_eq!(r["pass"], false);
        assert!(r["results"]["error"].is_string());
    }
}

#[test]
fn unknown_subcommand_exits_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_lagflop")).arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_all_is_deterministic_and_passes() {
    let (a, code_a, _) = run(&["verify", "all", "--seed", "7"]);
    let (b, code_b, _) = run(&["verify", "all", "--seed", "7"]);
    assert_eq!((code_a, code_b), (0, 0), "{a}");
    assert_eq!(a["pass"], true);
    assert_eq!(a["seed"], 7);
    let (a, b) = (strip_timing(a), strip_timing(b));
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn mutated_dualcurve_fails_with_named_check() {
    let (r, code, stderr) = run(&["verify", "all", "--seed", "7", "--mutate", "dualcurve"]);
    assert_eq!(code, 1);
    assert_eq!(r["pass"], false);
    let failed: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"dual_conic.proportional"), "{failed:?}");
    assert!(stderr.contains("failed: dual_conic.proportional"));
}
