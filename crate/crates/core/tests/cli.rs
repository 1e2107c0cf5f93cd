//! End-to-end runs of the `linunion` binary: exit codes, output shape and
//! byte-for-byte reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linunion")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn generate(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let out = p(dir.path(), name);
    let mut all = vec!["generate"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["-o", &out]);
    let r = run(&all);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    PathBuf::from(out)
}

#[test]
fn generate_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = generate(&dir, "a.json", &["random-discs", "--n", "30", "--seed", "2"]);
    let b = generate(&dir, "b.json", &["random-discs", "--n", "30", "--seed", "2"]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let v = json(&a);
    assert_eq!(v["kind"], "discs");
    assert_eq!(v["members"].as_array().unwrap().len(), 30);
    assert!(v["eps"].as_f64().unwrap() > 0.0);

    let r = run(&["generate", "random-discs", "--n", "5", "--seed", "2"]);
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert!(stdout.contains("\"members\""));
}

#[test]
fn generate_summary_and_errors() {
    let dir = TempDir::new().unwrap();
    let out = p(dir.path(), "c.json");
    let r = run(&["generate", "common-point-discs", "--n", "12", "--seed", "1", "--ox", "-3", "--oy", "2", "-o", &out]);
    assert_eq!(code(&r), 0);
    let s = String::from_utf8_lossy(&r.stdout);
    assert!(s.contains("n=12") && s.contains("discs") && s.contains("bbox"), "{s}");

    assert_eq!(code(&run(&["generate", "random-discs", "--n", "0"])), 2);
    assert_eq!(code(&run(&["generate", "random-discs", "--r-min", "3", "--r-max", "1"])), 2);
    assert_eq!(code(&run(&["generate", "lines-parabolas", "--n", "5"])), 2);
    // Margin no larger than the minimum radius cannot fit.
    assert_eq!(code(&run(&["generate", "common-point-discs", "--margin", "0.6"])), 2);
    // Fifty discs on a single point-sized box never reach general position.
    let r = run(&[
        "generate", "random-discs", "--n", "50", "--box-min", "0", "--box-max", "0", "--r-min", "1", "--r-max", "1",
        "--max-rounds", "3",
    ]);
    assert_eq!(code(&r), 3, "{}", String::from_utf8_lossy(&r.stderr));
}

#[test]
fn analyze_discs() {
    let dir = TempDir::new().unwrap();
    let f = generate(&dir, "d.json", &["random-discs", "--n", "25", "--seed", "5"]);
    let out = p(dir.path(), "a.json");
    let csv = p(dir.path(), "g.csv");
    let r = run(&["analyze", f.to_str().unwrap(), "--csv", &csv, "-o", &out]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let v = json(&out);
    assert_eq!(v["tool"], "linunion");
    assert_eq!(v["pass"], true);
    let stats = &v["result"]["stats"];
    assert_eq!(stats["bounds"]["thm1"]["pass"], true);
    assert_eq!(stats["bounds"]["corollary"]["pass"], true);
    assert!(stats["omega"].as_u64().unwrap() >= 1);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("k,g\n"));

    let again = p(dir.path(), "b.json");
    run(&["analyze", f.to_str().unwrap(), "-o", &again]);
    let (mut x, mut y) = (json(&out), json(&again));
    x["config"] = Value::Null;
    y["config"] = Value::Null;
    assert_eq!(x, y);
}

#[test]
fn analyze_common_point_family_reports_depth_bound() {
    let dir = TempDir::new().unwrap();
    let f = generate(&dir, "c.json", &["common-point-discs", "--n", "15", "--seed", "3"]);
    let out = p(dir.path(), "a.json");
    assert_eq!(code(&run(&["analyze", f.to_str().unwrap(), "-o", &out])), 0);
    let v = json(&out);
    let cp = &v["result"]["common_point_bound"];
    assert_eq!(cp["applicable"], true);
    assert!(!cp["rows"].as_array().unwrap().is_empty());
}

#[test]
fn analyze_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let f = generate(&dir, "d.json", &["random-discs", "--n", "10", "--seed", "1"]);
    let text = fs::read_to_string(&f).unwrap();
    let bad = p(dir.path(), "bad.json");
    fs::write(&bad, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&run(&["analyze", &bad])), 2);
    assert_eq!(code(&run(&["analyze", &p(dir.path(), "missing.json")])), 2);

    let tangent = p(dir.path(), "t.json");
    fs::write(
        &tangent,
        r#"{"kind":"discs","label":"t","eps":1e-9,"members":[{"id":0,"cx":0,"cy":0,"r":1},{"id":1,"cx":2,"cy":0,"r":1}]}"#,
    )
    .unwrap();
    assert_eq!(code(&run(&["analyze", &tangent])), 2);

    let gap = p(dir.path(), "gap.json");
    fs::write(
        &gap,
        r#"{"kind":"discs","label":"g","eps":1e-9,"members":[{"id":0,"cx":0,"cy":0,"r":1},{"id":2,"cx":1,"cy":0,"r":1}]}"#,
    )
    .unwrap();
    assert_eq!(code(&run(&["analyze", &gap])), 2);
}

#[test]
fn analyze_curves_certifies_every_k() {
    let dir = TempDir::new().unwrap();
    let f = generate(&dir, "c.json", &["lines-parabolas", "--n", "7", "--k", "3"]);
    let out = p(dir.path(), "a.json");
    assert_eq!(code(&run(&["analyze", f.to_str().unwrap(), "-o", &out])), 0);
    let certs = json(&out)["result"]["certificates"].as_array().unwrap().clone();
    assert_eq!(certs.len(), 6);
    assert!(certs.iter().all(|c| c["pass"] == true));
}

#[test]
fn sample_runs_and_validates() {
    let dir = TempDir::new().unwrap();
    let f = generate(&dir, "d.json", &["random-discs", "--n", "20", "--seed", "2"]);
    let fs_ = f.to_str().unwrap();
    let out = p(dir.path(), "s.json");
    let r = run(&["sample", fs_, "--p", "auto", "--trials", "5000", "--seed", "1", "-o", &out]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let v = json(&out);
    let s = &v["result"]["sample"];
    assert!(s["lower_bound"].as_f64().unwrap() <= s["exact_E"].as_f64().unwrap());
    assert!(s["exact_E"].as_f64().unwrap() <= s["upper_bound"].as_f64().unwrap());
    assert_eq!(s["per_trial_violations"], 0);
    assert_eq!(v["seed"], 1);

    let again = p(dir.path(), "s2.json");
    run(&["sample", fs_, "--p", "auto", "--trials", "5000", "--seed", "1", "-o", &again]);
    assert_eq!(json(&out)["result"], json(&again)["result"]);

    let one = p(dir.path(), "one.json");
    assert_eq!(code(&run(&["sample", fs_, "--p", "0.3", "--trials", "1", "-o", &one])), 0);
    assert!(json(&one)["result"]["sample"]["ci_halfwidth"].as_f64().unwrap() > 0.0);

    assert_eq!(code(&run(&["sample", fs_, "--p", "1"])), 2);
    assert_eq!(code(&run(&["sample", fs_, "--p", "0"])), 2);
    assert_eq!(code(&run(&["sample", fs_, "--p", "half"])), 2);
    let curves = generate(&dir, "c.json", &["lines-parabolas", "--n", "4", "--k", "2"]);
    assert_eq!(code(&run(&["sample", curves.to_str().unwrap()])), 2);
}

#[test]
fn charge_writes_ledger_and_certificate() {
    let dir = TempDir::new().unwrap();
    let f = generate(&dir, "c.json", &["random-curves", "--n", "12", "--seed", "9"]);
    let fs_ = f.to_str().unwrap();
    let ledger = p(dir.path(), "l.csv");
    let cert = p(dir.path(), "cert.json");
    let r = run(&["charge", fs_, "--k", "4", "--ledger", &ledger, "-o", &cert]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(&ledger).unwrap();
    assert!(text.starts_with("point_x,point_y,definer_a,definer_b,above_count,charged_curve,color\n"));
    let c = &json(&cert)["result"]["certificates"][0];
    assert_eq!(c["k"], 4);
    assert_eq!(c["pass"], true);
    assert_eq!(text.lines().count() - 1, c["qualifying_count"].as_u64().unwrap() as usize);

    let all = p(dir.path(), "all.json");
    assert_eq!(code(&run(&["charge", fs_, "--k", "all", "-o", &all])), 0);
    assert_eq!(json(&all)["result"]["certificates"].as_array().unwrap().len(), 11);

    assert_eq!(code(&run(&["charge", fs_, "--k", "1"])), 2);
    assert_eq!(code(&run(&["charge", fs_, "--k", "13"])), 2);
    let discs = generate(&dir, "d.json", &["random-discs", "--n", "5"]);
    assert_eq!(code(&run(&["charge", discs.to_str().unwrap(), "--k", "2"])), 2);
}

#[test]
fn lines_parabolas_ledger_matches_count() {
    let dir = TempDir::new().unwrap();
    let f = generate(&dir, "lp.json", &["lines-parabolas", "--n", "10", "--k", "3"]);
    let ledger = p(dir.path(), "l.csv");
    let cert = p(dir.path(), "cert.json");
    assert_eq!(code(&run(&["charge", f.to_str().unwrap(), "--k", "3", "--ledger", &ledger, "-o", &cert])), 0);
    let c = &json(&cert)["result"]["certificates"][0];
    assert_eq!(c["qualifying_count"], 32);
    assert_eq!(c["bound"], 40);
}
