use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn nmcond(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nmcond")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn registry_path() -> String {
    configs().join("registry.json").display().to_string()
}

fn micro_source() -> Value {
    json!({"kind": "flat", "n": 4, "subset": [0, 1, 2, 3, 4, 5, 6, 7]})
}

#[test]
fn certify_committed_registry() {
    let out = tempfile::tempdir().unwrap();
    let o = nmcond(&[
        "certify",
        "--config",
        configs().join("experiments/certify.json").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = out.path().join("certify/summary.json");
    let v = read(&summary);
    assert_eq!(v["schema"], "nmcond.certify-summary/1");
    assert!(v["certifications"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    // The reader accepts what the writer produced.
    let r = nmcond(&["report", summary.to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    assert!(String::from_utf8_lossy(&r.stdout).contains("ext_toeplitz"));
    let one = nmcond(&["report", out.path().join("certify/nm_ip.json").to_str().unwrap()]);
    assert_eq!(code(&one), 0);
}

#[test]
fn overclaimed_registry_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let reg = write(
        dir.path(),
        "registry.json",
        &json!({"schema": "nmcond.registry/1", "primitives": [
            {"name": "too_good", "kind": "strong_ext", "hash": "toeplitz", "n": 4, "d": 4, "m": 1, "k": 3, "eps": "1/1000"}
        ]}),
    );
    let cfg = write(
        dir.path(),
        "c.json",
        &json!({"schema": "nmcond.experiment/1", "name": "bad", "profile": "micro", "registry": reg}),
    );
    let o = nmcond(&["certify", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("too_good") && stderr(&o).contains("witness: Flat"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&nmcond(&["certify"])), 2);
    assert_eq!(code(&nmcond(&["no-such-command"])), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&nmcond(&["certify", "--config", missing.to_str().unwrap()])), 2);
    let cfg = write(
        dir.path(),
        "c.json",
        &json!({"schema": "nmcond.experiment/1", "name": "x", "profile": "micro", "registry": "nope.json"}),
    );
    assert_eq!(code(&nmcond(&["certify", "--config", cfg.to_str().unwrap()])), 2);
    let bad_schema = write(dir.path(), "s.json", &json!({"schema": "other/9", "name": "x", "profile": "micro"}));
    assert_eq!(code(&nmcond(&["oracle", "--config", bad_schema.to_str().unwrap()])), 2);
    let run_cfg = write(
        dir.path(),
        "r.json",
        &json!({"schema": "nmcond.experiment/1", "name": "x", "profile": "micro", "registry": registry_path(),
                "run": {"protocol": "aka", "source": micro_source(), "runs": 1}}),
    );
    let o = nmcond(&["run", "--config", run_cfg.to_str().unwrap(), "--seed", "xyz", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn invalid_profile_is_a_contract_violation() {
    let dir = tempfile::tempdir().unwrap();
    let mut profile: Value = read(&configs().join("profiles/micro.json"));
    profile["nm_cond"]["t"] = json!(5);
    write(dir.path(), "broken.json", &profile);
    let cfg = write(
        dir.path(),
        "c.json",
        &json!({"schema": "nmcond.experiment/1", "name": "x", "profile": "broken.json", "registry": registry_path()}),
    );
    let o = nmcond(&["certify", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("t = 4*|y1|"), "{}", stderr(&o));
}

fn run_once(cfg: &Path, out: &Path, seed: &str) -> Output {
    nmcond(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", seed])
}

#[test]
fn honest_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("experiments/run_desk_aka2.json");
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert_eq!(code(&run_once(&cfg, &a, "0a0b")), 0);
    assert_eq!(code(&run_once(&cfg, &b, "0a0b")), 0);
    assert_eq!(code(&run_once(&cfg, &c, "0a0c")), 0);
    let bytes = |d: &Path| std::fs::read(d.join("run/transcript.jsonl")).unwrap();
    assert_eq!(bytes(&a), bytes(&b));
    assert_ne!(bytes(&a), bytes(&c));
    let v = read(&a.join("run/outcome.json"));
    assert_eq!(v["schema"], "nmcond.outcome/1");
    assert_eq!((v["agree"].as_u64(), v["runs"].as_u64(), v["key_len"].as_u64()), (Some(20), Some(20), Some(8)));
    assert!(v["records"].as_array().unwrap().iter().all(|r| r["outcome"] == "agree"));
    assert!(v["attack_report"].is_null());
}

#[test]
fn attack_run_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("experiments/run_attack_micro.json");
    let o = nmcond(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--exact"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = read(&dir.path().join("run/outcome.json"));
    assert_eq!(v["attack_report"], "attack_report.json");
    let report = read(&dir.path().join("run/attack_report.json"));
    assert_eq!(report["strategy"], "substitute-w-keep-tag");
    assert_eq!(report["success"], "5/16");
    let lines = std::fs::read_to_string(dir.path().join("run/transcript.jsonl")).unwrap();
    assert!(lines.lines().any(|l| l.contains("\"field\":\"W\"") && l.contains("\"tampered\":true")));
    let r = nmcond(&["report", dir.path().join("run/attack_report.json").to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&r.stdout).contains("ledger product"));
}

#[test]
fn runs_refuse_uncertified_primitives() {
    let dir = tempfile::tempdir().unwrap();
    let reg = write(
        dir.path(),
        "registry.json",
        &json!({"schema": "nmcond.registry/1", "primitives": [
            {"name": "mac", "kind": "mac", "v": 2, "msg_len": 4, "eps": "1/2"}
        ]}),
    );
    let cfg = write(
        dir.path(),
        "c.json",
        &json!({"schema": "nmcond.experiment/1", "name": "x", "profile": "micro", "registry": reg, "seed": "00",
                "run": {"protocol": "aka", "source": micro_source(), "runs": 2}}),
    );
    let o = nmcond(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("refusing to run"));
}

fn suite_config(dir: &Path, scripts: Value, protocols: Value, baselines: Option<Value>) -> PathBuf {
    let mut cfg = json!({"schema": "nmcond.experiment/1", "name": "suite", "profile": "micro", "seed": "00",
        "attack_suite": {"protocols": protocols, "source": micro_source(), "scripts": scripts}});
    if let Some(b) = baselines {
        write(dir, "baselines.json", &b);
        cfg["attack_suite"]["baselines"] = json!("baselines.json");
    }
    write(dir, "suite.json", &cfg)
}

#[test]
fn suite_drift_names_the_script() {
    let dir = tempfile::tempdir().unwrap();
    let b = json!({"schema": "nmcond.baselines/1", "entries": {
        "aka/flip-t2": {"success": "0", "all_challenges_passed": "0"},
        "aka/substitute-w-keep-tag": {"success": "1/3"}
    }});
    let cfg = suite_config(dir.path(), json!(["flip-t2", "substitute-w-keep-tag"]), json!(["aka"]), Some(b));
    let o = nmcond(&["attack-suite", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("aka/substitute-w-keep-tag drifted") && !err.contains("flip-t2"), "{err}");
    let summary = read(&dir.path().join("o/attack_suite/summary.json"));
    assert_eq!(summary["rows"][0]["verdict"], "match");
    assert_eq!(summary["rows"][1]["verdict"], "drift");
}

#[test]
fn strict_mode_needs_every_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let b = json!({"schema": "nmcond.baselines/1", "entries": {}});
    let cfg = suite_config(dir.path(), json!(["flip-t2"]), json!(["aka"]), Some(b));
    let out = dir.path().join("o");
    let args = ["attack-suite", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    assert_eq!(code(&nmcond(&args)), 0);
    let o = nmcond(&[&args[..], &["--strict-baselines"]].concat());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("aka/flip-t2 has no committed baseline"));
}

#[test]
fn empty_suite_is_fine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = suite_config(dir.path(), json!([]), json!([]), None);
    let o = nmcond(&["attack-suite", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = read(&dir.path().join("attack_suite/summary.json"));
    assert_eq!(summary["rows"], json!([]));
}

#[test]
fn sampled_suite_skips_best_guess_scripts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = suite_config(dir.path(), json!(["passive", "substitute-w-guess-tag"]), json!(["aka"]), None);
    let o = nmcond(&[
        "attack-suite",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--trials",
        "50",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = read(&dir.path().join("attack_suite/summary.json"));
    assert_eq!(summary["exact"], false);
    assert_eq!(summary["rows"][0]["runs"], 50);
    assert_eq!(summary["rows"][1]["verdict"], "skipped");
}

#[test]
fn oracle_matches_committed_baselines() {
    let dir = tempfile::tempdir().unwrap();
    let o = nmcond(&[
        "oracle",
        "--config",
        configs().join("experiments/oracle_micro.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--strict-baselines",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let ans = read(&dir.path().join("oracle/nm_ext_n2_m1.json"));
    assert_eq!(ans["schema"], "nmcond.oracle/1");
    assert_eq!(ans["verdict"], "match");
    let r = nmcond(&["report", dir.path().join("oracle/nm_ext_n2_m1.json").to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&r.stdout).contains("worst_distance"));
}

#[test]
fn report_rejects_unknown_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "x.json", &json!({"schema": "something/1"}));
    assert_eq!(code(&nmcond(&["report", p.to_str().unwrap()])), 2);
}
