use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::sync::Arc;

use premonoidal::io::{diagram_to_json, theory_to_file, to_json};
use premonoidal::theory::global_state_theory;
use premonoidal::{Diagram, EffectfulSignature, Slice};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_premonoidal"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn core_tests(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests")
        .join(name)
        .to_str()
        .unwrap()
        .to_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path: PathBuf = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

/// `f` acts on `A`, `g` on `B`; `f` is effectful unless `pure_f`.
fn disjoint(pure_f: bool) -> Arc<EffectfulSignature> {
    let sig = EffectfulSignature::new().with_sort("A").with_sort("B");
    let sig = if pure_f {
        sig.with_pure("f", &["A"], &["A"])
    } else {
        sig.with_effectful("f", &["A"], &["A"])
    };
    Arc::new(sig.with_effectful("g", &["B"], &["B"]))
}

fn interchange_sides(dir: &TempDir, pure_f: bool) -> (String, String) {
    let sig = disjoint(pure_f);
    let dom = vec!["A".into(), "B".into()];
    let left = Diagram::new(&sig, dom.clone(), vec![Slice::new("f", 0), Slice::new("g", 1)]).unwrap();
    let right = Diagram::new(&sig, dom, vec![Slice::new("g", 1), Slice::new("f", 0)]).unwrap();
    (
        write(dir, "left.json", &diagram_to_json(&left)),
        write(dir, "right.json", &diagram_to_json(&right)),
    )
}

#[test]
fn interchange_fails_for_two_effects() {
    let dir = TempDir::new().unwrap();
    let (l, r) = interchange_sides(&dir, false);
    let out = run(&["equal", &l, &r]);
    assert_eq!(stdout(&out), "not-equal\n");
    assert_eq!(out.status.code(), Some(1));

    let (l, r) = interchange_sides(&dir, true);
    let out = run(&["equal", &l, &r]);
    assert_eq!(stdout(&out), "equal\n");
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["--json", "equal", &l, &r]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["equal"], true);
    assert_eq!(v["mode"], "exchange");
}

#[test]
fn encode_decode_round_trip_through_pipes() {
    let dir = TempDir::new().unwrap();
    let (l, _) = interchange_sides(&dir, false);
    let encoded = run(&["encode", &l]);
    assert!(encoded.status.success(), "{}", stderr(&encoded));
    let mut child = bin()
        .args(["decode", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&encoded.stdout).unwrap();
    let decoded = child.wait_with_output().unwrap();
    assert!(decoded.status.success());
    assert_eq!(stdout(&decoded), std::fs::read_to_string(&l).unwrap());

    // Runtime files compare up to braids, and the verdict is unchanged.
    let (l, r) = interchange_sides(&dir, false);
    let rl = write(&dir, "rl.json", &stdout(&run(&["encode", &l])));
    let rr = write(&dir, "rr.json", &stdout(&run(&["encode", &r])));
    let out = run(&["--json", "equal", &rl, &rr]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        (v["equal"].clone(), v["mode"].clone()),
        (false.into(), "runtime".into())
    );
}

#[test]
fn compile_and_render_hello_world() {
    let dir = TempDir::new().unwrap();
    let sig = core_tests("data/hello.sig.json");
    let hw = dir.path().join("hw.json");
    let out = run(&[
        "compile",
        &core_tests("data/hello_world.arrow"),
        "--sig",
        &sig,
        "-o",
        hw.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = run(&["render", "--mode", "svg", "--show-runtime", hw.to_str().unwrap()]);
    assert!(out.status.success());
    let golden = std::fs::read_to_string(core_tests("golden/hello_world_runtime.svg")).unwrap();
    assert_eq!(stdout(&out), golden);

    let text = stdout(&run(&["render", hw.to_str().unwrap()]));
    assert!(text.contains("[print]") && text.contains("[hello]"));
}

#[test]
fn compile_errors_carry_positions() {
    let dir = TempDir::new().unwrap();
    let src = write(&dir, "bad.arrow", "proc () -> do { x <- }\n");
    let out = run(&["compile", &src, "--sig", &core_tests("data/hello.sig.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("bad.arrow:1:22: syntax error"),
        "{}",
        stderr(&out)
    );

    let src = write(
        &dir,
        "reuse.arrow",
        "proc () -> do\n  s <- get -< ()\n  () <- print -< s\n  () <- print -< s\n  return ()\n",
    );
    let out = run(&["compile", &src, "--sig", &core_tests("data/hello.sig.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("4:18: variable `s` is used more than once"));
}

#[test]
fn prove_with_a_theory_file() {
    let dir = TempDir::new().unwrap();
    let theory = global_state_theory();
    let t = write(&dir, "gs.json", &to_json(&theory_to_file(&theory)));
    let rule = theory.rule("get-put").unwrap();
    let l = write(&dir, "l.json", &diagram_to_json(&rule.lhs));
    let r = write(&dir, "r.json", &diagram_to_json(&rule.rhs));
    let out = run(&["prove", "--theory", &t, &l, &r]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "1. get-put forward at slice 0, shift 0 after 0 exchanges\n"
    );

    // `put` and `discard` have the same type but no proof relates them.
    let sig = theory.sig();
    let put = write(
        &dir,
        "put.json",
        &diagram_to_json(&Diagram::from_generator(sig, "put").unwrap()),
    );
    let discard = write(
        &dir,
        "discard.json",
        &diagram_to_json(&Diagram::from_generator(sig, "discard").unwrap()),
    );
    let out = run(&["--max-states", "200", "prove", "--theory", &t, &put, &discard]);
    assert_eq!(stdout(&out), "not-found within limits\n");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn demo_state_prints_four_traces() {
    let out = run(&["demo-state"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for case in ["f-only", "g-only", "f-then-g", "g-then-f"] {
        assert!(text.contains(&format!("{case}: ")), "{text}");
    }
    assert_eq!(text.matches("proven in").count(), 4);

    let out = run(&["--json", "--workers", "2", "demo-state"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let cases = v.as_array().unwrap();
    assert_eq!(cases.len(), 4);
    assert!(cases
        .iter()
        .all(|c| c["trace"]["steps"].as_array().is_some_and(|s| !s.is_empty())));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["equal", "only-one.json"]).status.code(), Some(2));
    let out = run(&["normalize", "/nonexistent/d.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot read"));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn validate_reports_violations() {
    let dir = TempDir::new().unwrap();
    let good = run(&["validate", &core_tests("data/hello.sig.json")]);
    assert_eq!((stdout(&good).as_str(), good.status.code()), ("ok\n", Some(0)));
    let bad = write(
        &dir,
        "bad.json",
        r#"{"sorts": ["X", "X"], "pure": [{"id": "f", "dom": ["Y"], "cod": []}], "effectful": []}"#,
    );
    let out = run(&["--json", "validate", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"].as_array().unwrap().len(), 2);
}

#[test]
fn normalize_is_idempotent() {
    let dir = TempDir::new().unwrap();
    let (_, r) = interchange_sides(&dir, true);
    let once = stdout(&run(&["normalize", &r]));
    let path = write(&dir, "nf.json", &once);
    assert_eq!(stdout(&run(&["normalize", &path])), once);
    let out = run(&["--json", "normalize", &r]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["witness"].is_array());
}
