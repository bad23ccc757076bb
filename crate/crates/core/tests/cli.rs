use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::Value;

const CP2: &str = "
# formality weights: w = degree
fdalgebra H {
    basis 1 : deg 0, wt 0;
    basis u : deg 2, wt 2;
    basis u2 : deg 4, wt 4;
    unit 1;
    mul u*u = u2;
}
cdga M { gen x : deg 2, wt 2; gen y : deg 5, wt 6; d y = x^3; window 0..14; }
dgla L { gen v1 : deg -1, wt -2; gen v2 : deg -3, wt -4; d v2 = 1/2 [v1,v1]; window -10..-1; }
";

fn wrht(args: &[&str], stdin: &str) -> (i32, Value, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_wrht"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn wrht");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let v = if text.trim().is_empty() { Value::Null } else { serde_json::from_str(&text).expect("JSON on stdout") };
    (out.status.code().unwrap(), v, String::from_utf8(out.stderr).unwrap())
}

#[test]
fn check_reads_stdin() {
    let (code, v, _) = wrht(&["check", "-"], CP2);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["passed"], true);
    assert_eq!(v["result"]["blocks"].as_array().unwrap().len(), 3);
}

#[test]
fn quillen_then_ce() {
    let (code, v, err) = wrht(&["quillen", "-", "--window", "-8..-1"], CP2);
    assert_eq!(code, 0, "{err}");
    assert_eq!(v["passed"], true);
    let (code, v, err) = wrht(&["ce", "-", "--block", "L", "--window", "0..8"], CP2);
    assert_eq!(code, 0, "{err}");
    assert_eq!(v["passed"], true);
}

#[test]
fn transfer_and_segment() {
    let (code, v, err) = wrht(&["transfer", "-", "--block", "M", "--window", "0..12", "--arity", "5"], CP2);
    assert_eq!(code, 0, "{err}");
    assert_eq!(v["passed"], true);
    let (code, v, _) = wrht(&["segment", "-", "--block", "H"], CP2);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["k"], 0);
}

#[test]
fn aut_and_loop_models() {
    let (code, v, err) = wrht(&["aut-model", "-", "--block", "M", "--window", "-6..0"], CP2);
    assert_eq!(code, 0, "{err}");
    assert_eq!(v["result"]["weights"], "negative");
    for kind in ["free", "cyclic"] {
        let (code, v, err) = wrht(&["loop-model", "-", "--block", "M", "--window", "0..8", "--kind", kind], CP2);
        assert_eq!(code, 0, "{kind}: {err}");
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn suite_without_input() {
    let (code, v, _) = wrht(&["verify-suite"], "");
    assert_eq!(code, 0);
    assert_eq!(v["result"]["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn parse_errors_exit_2() {
    let (code, v, err) = wrht(&["check", "-"], "cdga M { gen x : deg 2 wt 2; }");
    assert_eq!(code, 2);
    assert!(v.is_null());
    assert!(err.contains("line 1"), "{err}");
    let (code, _, _) = wrht(&["no-such-command"], "");
    assert_eq!(code, 2);
}
