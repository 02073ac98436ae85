//! End-to-end runs of the `charcalc` binary.

use std::path::Path;
use std::process::{Command, Output};

fn charcalc(args: &[&str]) -> Output {
    charcalc_in(args, None)
}

fn charcalc_in(args: &[&str], workspace_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_charcalc"));
    cmd.args(args).env_remove(charcalc::workspace::WORKSPACE_ENV);
    if let Some(p) = workspace_env {
        cmd.env(charcalc::workspace::WORKSPACE_ENV, p);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn op_apply_sends_the_generator() {
    let o = charcalc(&["op", "apply", "--op", "qmodl", "--prime", "2", "--space", "P2", "--expr", "u"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "u + u^2");
}

#[test]
fn genus_eval_of_mod_p_preset_on_a_line() {
    let o = charcalc(&["genus", "eval", "--op", "qmodp", "--prime", "2", "--bundle", "N"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "c1(N)");
    let o = charcalc(&["genus", "eval", "--op", "qmodp", "--prime", "2", "--bundle", "E"]);
    assert_eq!(stdout(&o).trim(), "c2(E)");
}

#[test]
fn verify_all_passes() {
    let o = charcalc(&["verify", "all", "--prime", "3", "--max-dim", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 failed"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&charcalc(&["frobnicate"])), 2);
    assert_eq!(code(&charcalc(&["--prime", "4", "space", "show", "P2"])), 2);
    let bad = charcalc(&["op", "apply", "--op", "qmodl", "--space", "P2", "--expr", "u +"]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("offset 3"));
    let obstructed = charcalc(&["verify", "transfer", "--map", "power1", "--op", "qmodp", "--prime", "3"]);
    assert_eq!(code(&obstructed), 1);
    assert_eq!(code(&charcalc(&["verify", "degree", "--n", "5", "--s", "3", "--prime", "3"])), 0);
}

#[test]
fn json_output_is_stable_under_reserialization() {
    for args in [
        &["--format", "json", "space", "show", "Gr24"][..],
        &["--format", "json", "op", "apply", "--op", "qmodl", "--prime", "3", "--space", "P2", "--expr", "u"],
        &["--format", "json", "verify", "grr", "--map", "P2_to_pt", "--op", "qmodl", "--expr", "u^2"],
    ] {
        let o = charcalc(args);
        assert_eq!(code(&o), 0, "{args:?}");
        let text = stdout(&o);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let again: serde_json::Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, again);
    }
    let o = charcalc(&["--format", "json", "verify", "wu", "--embedding", "P1_in_P2", "--op", "qmodl", "--prime", "3"]);
    let text = stdout(&o);
    let report = charcalc::verify::Report::from_json(&text).unwrap();
    assert_eq!(report.to_json(), text.trim_end());
}

#[test]
fn reports_replay_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("suite.json");
    let o = charcalc(&["--format", "json", "verify", "all", "--prime", "2", "--max-dim", "2"]);
    assert_eq!(code(&o), 0);
    std::fs::write(&path, o.stdout).unwrap();
    let r = charcalc(&["--format", "json", "verify", "replay", path.to_str().unwrap()]);
    assert_eq!(code(&r), 0);
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["identical"], true);

    let mut tampered: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    tampered["reports"][0]["lhs"] = "u^7".into();
    std::fs::write(&path, serde_json::to_string_pretty(&tampered).unwrap()).unwrap();
    let r = charcalc(&["verify", "replay", path.to_str().unwrap()]);
    assert_eq!(code(&r), 1);
}

#[test]
fn workspace_persistence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ws.json");
    let p = path.to_str().unwrap();
    assert_eq!(code(&charcalc(&["--workspace", p, "workspace", "init"])), 0);
    assert_eq!(code(&charcalc(&["--workspace", p, "workspace", "init"])), 2);
    let first = std::fs::read(&path).unwrap();
    assert_eq!(code(&charcalc(&["--workspace", p, "workspace", "normalize"])), 0);
    assert_eq!(std::fs::read(&path).unwrap(), first);

    // A hand-edited file normalizes to the canonical bytes once, then stays put.
    let mut w: serde_json::Value = serde_json::from_slice(&first).unwrap();
    w["bundles"]["M"] = serde_json::json!({"space": "P3", "rank": 1, "total": "1+u"});
    std::fs::write(&path, serde_json::to_string(&w).unwrap()).unwrap();
    assert_eq!(code(&charcalc(&["--workspace", p, "workspace", "normalize"])), 0);
    let once = std::fs::read(&path).unwrap();
    assert_eq!(code(&charcalc(&["--workspace", p, "workspace", "normalize"])), 0);
    assert_eq!(std::fs::read(&path).unwrap(), once);

    // The environment variable selects the same file.
    let o = charcalc_in(&["bundle", "show", "M"], Some(&path));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("1 + u"));
    assert_eq!(code(&charcalc(&["bundle", "show", "M"])), 2);
}

#[test]
fn schema_is_published() {
    let o = charcalc(&["schema"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["$defs"]["report"].is_object());
}
