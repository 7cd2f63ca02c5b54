use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_jtalg")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (code, out, err) = run(&full);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}")))
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("jtalg-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn decide_exit_codes() {
    let (code, out, _) = run(&["decide", "l((x*y)) = x"]);
    assert_eq!((code, out.trim()), (0, "Entailed"));
    let (code, out, _) = run(&["decide", "l(x) = x"]);
    assert_eq!((code, out.trim()), (1, "Collapsing"));
    let (code, _, err) = run(&["decide", "l(x = x"]);
    assert_eq!(code, 2);
    assert!(err.contains("offset 4"), "{err}");
    assert_eq!(run(&["decide"]).0, 2);
    assert_eq!(run(&["decide", "x = x", "--bogus"]).0, 2);
}

#[test]
fn proofs_round_trip() {
    for id in ["(x*y) = (y*x)", "(l(z)*r(z)) = z", "l(l(x)) = r(y)", "((x*y)*z) = (x*(y*z))"] {
        let (code, v) = json(&["decide", id, "--proof"]);
        let path = scratch("proof.json", &serde_json::to_string(&v).unwrap());
        let (check, out, err) = run(&["check-proof", path.to_str().unwrap()]);
        assert_eq!(check, 0, "{id}: {out} {err}");
        let bare = scratch("bare.json", &serde_json::to_string(&v["proof"]).unwrap());
        assert_eq!(run(&["check-proof", bare.to_str().unwrap()]).0, 0);
        let (_, text, _) = run(&["decide", id, "--proof"]);
        let txt = scratch("proof.txt", &text);
        assert_eq!(run(&["check-proof", txt.to_str().unwrap()]).0, 0);
        assert_eq!(text.lines().next().unwrap(), v["verdict"].as_str().unwrap());
        assert_eq!(code, if v["verdict"] == "Entailed" { 0 } else { 1 });
    }
}

#[test]
fn tampered_proof_is_rejected() {
    let (_, mut v) = json(&["decide", "(x*y) = (y*x)", "--proof"]);
    v["proof"]["steps"][0]["pos"] = serde_json::json!(["under_l", "under_l"]);
    let path = scratch("bad.json", &serde_json::to_string(&v).unwrap());
    let (code, out, _) = run(&["check-proof", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.starts_with("invalid: step 0"), "{out}");
    let garbage = scratch("garbage.json", "{ not json");
    assert_eq!(run(&["check-proof", garbage.to_str().unwrap()]).0, 2);
}

#[test]
fn jw_commands() {
    assert_eq!(run(&["jw", "mul", "3", "4"]).1.trim(), "32");
    assert_eq!(run(&["jw", "unpair", "23"]).1.trim(), "4 2");
    assert_eq!(run(&["jw", "descent", "40"]).1.trim(), "40 4 1 0");
    let (_, out, _) = run(&["jw", "table", "--rows", "5", "--cols", "5"]);
    assert_eq!(out.lines().nth(2).unwrap().split_whitespace().collect::<Vec<_>>(), ["3", "7", "12", "18", "25"]);
    let (code, v) = json(&["jw", "verify", "--bound", "5000"]);
    assert_eq!((code, v["failure_count"].as_u64()), (0, Some(0)));
    assert_eq!(run(&["jw", "mul", "w", "1"]).0, 2);
    let (_, csv, _) = run(&["--format", "csv", "jw", "table", "--rows", "2", "--cols", "2"]);
    assert_eq!(csv, "p,0,1\n0,1,2\n1,0,4\n");
    assert_eq!(run(&["--format", "csv", "jw", "mul", "1", "2"]).0, 2);
}

#[test]
fn jw1_commands() {
    assert_eq!(run(&["jw1", "mul", "w", "w", "--stages", "2"]).1.trim(), "w+1");
    assert_eq!(run(&["jw1", "mul", "w", "0"]).1.trim(), "w+5");
    assert_eq!(run(&["jw1", "right", "w+4", "--stages", "2"]).1.trim(), "w+6");
    assert_eq!(run(&["jw1", "left", "w+6"]).1.trim(), "w+1");
    assert_eq!(run(&["jw1", "descent", "w+8"]).1.trim(), "w+8 w+2 w");
    assert_eq!(run(&["jw1", "left", "w*3", "--stages", "2"]).0, 2);
    let (code, _, err) = run(&["jw1", "left", "w+x"]);
    assert_eq!(code, 2);
    assert!(err.contains("offset 2"), "{err}");
    let (code, v) = json(&["jw1", "verify", "--stages", "2", "--window", "32"]);
    assert_eq!(code, 0);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["failure_count"] == 0));
    let (_, csv, _) = run(&["--format", "csv", "jw1", "dump", "--stages", "2", "--window", "2"]);
    assert!(csv.starts_with("row,col,value,kind,region\n"));
    assert!(csv.contains("\nw,w,w+1,odd,w\n"), "{csv}");
}

#[test]
fn text_and_json_agree() {
    for id in ["l(x) = l(y)", "r((x*y)) = y"] {
        let (c1, text, _) = run(&["decide", id]);
        let (c2, v) = json(&["decide", id]);
        assert_eq!(c1, c2);
        assert_eq!(text.trim(), v["verdict"].as_str().unwrap());
    }
    let (_, text, _) = run(&["eval", "(x*y)", "x=3", "y=4"]);
    let (_, v) = json(&["eval", "(x*y)", "x=3", "y=4"]);
    assert_eq!(text.trim(), v["value"].as_str().unwrap());
    let (_, text, _) = run(&["normalize", "r(l(((x*(y*z))*w)))"]);
    let (_, v) = json(&["normalize", "r(l(((x*(y*z))*w)))"]);
    assert_eq!(text.trim(), v["normal_form"].as_str().unwrap());
    assert_eq!(text.trim(), "(y*z)");
}

#[test]
fn eval_and_axioms() {
    assert_eq!(run(&["eval", "l(x)", "x=13"]).1.trim(), "1");
    assert_eq!(run(&["eval", "(x*y)", "x=w", "y=w", "--stages", "2"]).1.trim(), "w+1");
    let (code, _, err) = run(&["eval", "(x*z)", "x=1"]);
    assert_eq!(code, 2);
    assert!(err.contains("`z`"), "{err}");
    assert_eq!(run(&["eval", "x", "x=w", "--stages", "1"]).0, 2);
    let (code, v) = json(&["axioms", "--probe", "50"]);
    assert_eq!((code, v["checked"].as_u64()), (0, Some(50 * 50 * 2 + 50)));
    assert_eq!(run(&["axioms", "--stages", "2", "--window", "16", "--probe", "32"]).0, 0);
}

#[test]
fn survey_and_closure() {
    let (code, v) = json(&["--seed", "5", "--budget", "300", "survey"]);
    assert_eq!(code, 0);
    assert_eq!(v["count"], 300);
    assert!(v["failures"].as_array().unwrap().is_empty());
    let (_, again) = json(&["--seed", "5", "--budget", "300", "survey"]);
    assert_eq!(v, again);
    let (_, out, _) = run(&["jw", "closure", "5"]);
    assert_eq!(out.trim(), "0 1 2 5");
    let (_, v) = json(&["jw", "closure", "0", "--ceiling", "10"]);
    assert_eq!(v["elements"].as_array().unwrap().len(), 11);
    let (_, out, _) = run(&["jw1", "closure", "w+3"]);
    assert!(out.split_whitespace().any(|e| e == "w"), "{out}");
}
