use std::process::{Command, Output};

fn mfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfree"))
        .args(args)
        .env_remove("MFREE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const CONFIG: &str = r#"{
  "ensemble": {"kind": "hermitian", "r": 2, "d": ["1/2", "1/2"],
               "V": {"1": [["1", "1/2"], ["1/2", "1"]]}, "seed": 3},
  "experiment": {"word": "S[2,1] S[1,2] S[2,1] S[1,2]", "q": 2, "n_list": [8, 16], "trials": 40}
}"#;

fn config_file(dir: &tempfile::TempDir, text: &str) -> String {
    let p = dir.path().join("cfg.json");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn query_examples() {
    let out = mfree(&["fuss-narayana", "--k", "2", "--p", "1", "--eval", "d0=1,d1=t"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "t + t^2\n");
    let out = mfree(&["meixner", "--a1", "0", "--a2", "0", "--b1", "1", "--b2", "1", "--k", "4"]);
    assert_eq!(stdout(&out), "2\n");
    let out = mfree(&["boxtimes", "--t", "1", "--t", "0.5", "--k", "1"]);
    assert_eq!(stdout(&out), "1/2\n");
    let out = mfree(&["meixner", "--a1", "-1/2", "--a2", "0", "--b1", "1", "--b2", "1", "--k", "1"]);
    assert_eq!(stdout(&out), "-1/2\n");
    let out = mfree(&["mp", "--k", "2", "--t", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["value"], "6");
}

#[test]
fn exit_codes() {
    // argument error from clap
    assert_eq!(mfree(&["boxtimes", "--k", "1"]).status.code(), Some(2));
    // invalid parameter
    assert_eq!(mfree(&["fuss-narayana", "--k", "0", "--p", "1"]).status.code(), Some(2));
    // malformed number
    assert_eq!(mfree(&["mp", "--k", "1", "--t", "1/"]).status.code(), Some(4));
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_file(&dir, CONFIG);
    assert_eq!(mfree(&["--config", &cfg, "exact", "--word", "S[1"]).status.code(), Some(4));
    assert_eq!(mfree(&["exact"]).status.code(), Some(2));
    let broken = config_file(&dir, "{\"ensemble\": [");
    assert_eq!(mfree(&["--config", &broken, "exact"]).status.code(), Some(4));
}

#[test]
fn exact_uses_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_file(&dir, CONFIG);
    let out = mfree(&["--config", &cfg, "exact"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // (d_p^2 + d_p d_q) v^2 = (1/4 + 1/4) / 4
    assert_eq!(stdout(&out), "1/8\n");
}

#[test]
fn compare_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_file(&dir, CONFIG);
    let csv_path = dir.path().join("r.csv");
    let out = mfree(&["--config", &cfg, "--out", csv_path.to_str().unwrap(), "--threads", "2", "compare"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("word,q,n,trials,mc_mean_re"));
    assert!(lines[1].contains(",1/8,0,"));

    let out = mfree(&["--config", &cfg, "--format", "json", "compare"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["n"], 16);
    assert_eq!(rows[1]["limit_re"], "1/8");
    assert!(rows[1]["wick_re"].is_string());
}

#[test]
fn simulate_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_file(&dir, CONFIG);
    let a = mfree(&["--config", &cfg, "--threads", "1", "simulate", "--n", "12"]);
    let b = Command::new(env!("CARGO_BIN_EXE_mfree"))
        .args(["--config", &cfg, "simulate", "--n", "12"])
        .env("MFREE_THREADS", "3")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert!(!stdout(&a).contains("1/8"));
    let c = mfree(&["--config", &cfg, "--seed", "4", "simulate", "--n", "12"]);
    assert_ne!(stdout(&a), stdout(&c));
}
