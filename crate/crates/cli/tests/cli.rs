use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn rml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rml")).args(args).env_remove("RML_THREADS").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rml-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn missing_p_is_a_usage_error() {
    let out = rml(&["analyze-multiplier", "--family", "bochner-riesz", "--delta", "1.0", "--dim", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--p"));
}

#[test]
fn bad_flags_and_threads_exit_one() {
    assert_eq!(rml(&["density", "--bogus"]).status.code(), Some(1));
    assert_eq!(rml(&["--threads", "0", "verify", "interp-2.2"]).status.code(), Some(1));
    assert_eq!(rml(&["--help"]).status.code(), Some(0));
}

#[test]
fn bochner_riesz_sides_of_the_critical_index() {
    // d = 4, p = 1.1: the kernel tail r^{-(d+1)/2-δ} is p-integrable iff δ > 4(1/p − 1/2) − 1/2 ≈ 1.136.
    let run = |delta: &str| {
        let out = rml(&["analyze-multiplier", "--family", "bochner-riesz", "--delta", delta, "--dim", "4", "--p", "1.1", "--r-max", "48"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        json(&out)["criterion"]["finite"].clone()
    };
    assert_eq!(run("1.3"), Value::from(true));
    assert_eq!(run("1.0"), Value::from(false));
}

#[test]
fn zero_compact_profile_has_zero_criterion() {
    let path = scratch("zero.csv");
    let mut text = String::from("# dim=4 tail=none\n");
    for i in 0..=300 {
        text.push_str(&format!("{},0\n", i as f64 * 0.01));
    }
    std::fs::write(&path, text).unwrap();
    let out = rml(&["analyze-multiplier", "--family", "compact-profile", "--input", path.to_str().unwrap(), "--p", "1.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["criterion"]["sup"].as_f64(), Some(0.0));
    assert_eq!(v["config"]["dim"].as_u64(), Some(4));
}

#[test]
fn verify_ids() {
    let out = rml(&["verify", "no-such-lemma"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gram-3.3"));
    for args in [
        vec!["verify", "gram-3.3", "--pairs", "200"],
        vec!["verify", "interp-2.2"],
        vec!["verify", "main-3.1", "--dim", "4", "--p", "1.1", "--seed", "7"],
        vec!["verify", "support-3.7", "--size", "60"],
        vec!["verify", "atoms-7.1", "--grid", "64"],
        vec!["verify", "smoothing-1.2"],
    ] {
        let out = rml(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
        let v = json(&out);
        assert_eq!(v["verdict"], "PASS");
        assert!(!v["table"].as_array().unwrap().is_empty(), "{args:?}");
    }
}

#[test]
fn broken_frozen_bound_exits_three() {
    // p ≥ p_d(4) = 6/5 is outside the proven range, which the report flags.
    let out = rml(&["verify", "main-3.1", "--p", "1.3", "--family", "uniform", "--doublings", "1", "--samples", "2000", "--replicates", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["verdict"], "FAIL");
}

#[test]
fn density_singleton_and_separation() {
    let path = scratch("one.csv");
    std::fs::write(&path, "# dim=2\n0,0,3\n").unwrap();
    let v = json(&rml(&["density", "--input", path.to_str().unwrap()]));
    let nonempty: Vec<&Value> = v["strata"].as_array().unwrap().iter().filter(|s| s["members"].as_u64() != Some(0)).collect();
    assert_eq!(nonempty.len(), 1);
    assert_eq!(nonempty[0]["invariants"], "PASS");

    let bad = scratch("bad.csv");
    std::fs::write(&bad, "# dim=2\n0,0,3\n0.5,0,3\n").unwrap();
    let out = rml(&["density", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("members 0 and 1"));
}

#[test]
fn density_clustered_fixture_passes() {
    let out = rml(&["density", "--input", &fixture("clustered_1000.csv")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["members"].as_u64(), Some(1000));
    assert!(v["strata"].as_array().unwrap().iter().all(|s| s["invariants"] == "PASS"));
}

#[test]
fn config_merge_csv_and_out() {
    let cfg = scratch("cfg.json");
    std::fs::write(&cfg, r#"{"family": "uniform", "size": 20, "dim": 3, "k": 4, "seed": 11, "emit": "json"}"#).unwrap();
    let out_path = scratch("strata.csv");
    let out = rml(&["density", "--config", cfg.to_str().unwrap(), "--seed", "12", "--emit", "csv", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let first = text.lines().next().unwrap();
    let echoed: Value = serde_json::from_str(first.strip_prefix("# config=").unwrap()).unwrap();
    assert_eq!(echoed["seed"].as_u64(), Some(12));
    assert_eq!(echoed["dim"].as_u64(), Some(3));
    assert_eq!(echoed["emit"], "csv");
    assert!(text.lines().nth(1).unwrap().starts_with("k,nu,u,members"));

    // The echoed config reproduces the run byte for byte.
    let again = scratch("again.json");
    std::fs::write(&again, serde_json::to_string(&echoed).unwrap()).unwrap();
    let out2 = rml(&["density", "--config", again.to_str().unwrap()]);
    assert_eq!(out2.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), text);
}

#[test]
fn thread_count_does_not_change_reports() {
    let a = rml(&["--threads", "1", "verify", "gram-3.3", "--pairs", "100"]);
    let b = Command::new(env!("CARGO_BIN_EXE_rml")).args(["verify", "gram-3.3", "--pairs", "100"]).env("RML_THREADS", "4").output().unwrap();
    let (mut va, mut vb) = (json(&a), json(&b));
    assert_eq!(vb["config"]["threads"].as_u64(), Some(4));
    va["config"]["threads"] = Value::Null;
    vb["config"]["threads"] = Value::Null;
    assert_eq!(va, vb);
}

#[test]
fn wave_table_and_export() {
    let prefix = scratch("wk_");
    let out = rml(&["wave", "--kmax", "3", "--emit", "csv", "--export", prefix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().nth(1), Some("k,w_l1,e_l1,e_step"));
    assert_eq!(text.lines().count(), 5);
    let w = std::fs::read_to_string(format!("{}w_2.csv", prefix.display())).unwrap();
    assert!(w.starts_with("# dim=4"));
}
