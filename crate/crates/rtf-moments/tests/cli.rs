use std::process::Command;

fn rtf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rtf"))
}

#[test]
fn verify_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("second.json");
    let out = rtf()
        .args(["verify", "second-moment", "--field", "Q", "--weights", "12,16", "--levels", "1"])
        .args(["--hecke", "1,2", "--tol", "1e-4", "--no-timings", "--report"])
        .arg(&report)
        .env("RTF_CACHE_DIR", dir.path().join("cache"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("4 passed, 0 failed"), "{stdout}");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["version"], 1);
    assert_eq!(json["cases"].as_array().unwrap().len(), 4);
    assert!(json["cases"][0]["wall_time_s"].is_null());
    assert!(dir.path().join("cache").exists());
}

#[test]
fn reports_round_trip_and_repeat_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for (i, threads) in ["1", "4"].iter().enumerate() {
        let path = dir.path().join(format!("first{i}.json"));
        let status = rtf()
            .args(["verify", "first-moment", "--weights", "12,14", "--hecke", "1,3", "--levels", "1,5"])
            .args(["--threads", threads, "--no-timings", "--report"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        texts.push(std::fs::read_to_string(&path).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let parsed: rtf_moments::harness::MomentReport = serde_json::from_str(&texts[0]).unwrap();
    assert_eq!(rtf_moments::harness::to_json(&parsed).unwrap(), texts[0]);
}

#[test]
fn proportion_prints_json_without_report_path() {
    let out = rtf().args(["proportion", "--regimes", "all"]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("level-aspect"));
    assert!(stdout.contains("\"uniform_floor\""));
}

#[test]
fn failing_tolerance_exits_one() {
    let out = rtf()
        .args(["verify", "second-moment", "--weights", "12", "--hecke", "1", "--tol", "1e-15", "--truncation-tol", "1e-4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn bad_configuration_exits_two() {
    let out = rtf().args(["verify", "second-moment", "--weights", "13"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "weights = 12\nbogus = 3\n").unwrap();
    let out = rtf().args(["verify", "second-moment", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# grid\nweights = 12, 16\nhecke = 1\n").unwrap();
    let report = dir.path().join("r.json");
    let status = rtf()
        .args(["verify", "second-moment", "--weights", "20", "--no-timings", "--config"])
        .arg(&cfg)
        .arg("--report")
        .arg(&report)
        .status()
        .unwrap();
    assert!(status.success());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["config"]["weights"], serde_json::json!([20]));
}

#[test]
fn specfun_and_mollified_commands_run() {
    let out = rtf().args(["specfun-check", "--samples", "500", "--seed", "3"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let out = rtf().args(["mollified", "--xi-exponent", "0.25", "--weights", "12,16"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}
