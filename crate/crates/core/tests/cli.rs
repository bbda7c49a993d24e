use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torsion-probe"))
        .args(args)
        .env_remove("TORSION_PROBE_CACHE")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classgroup_output() {
    let o = run(&["field", "classgroup", "--disc", "-23"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "{\"disc\":-23,\"divisors\":[3],\"h\":3}\n");
    let header = String::from_utf8(o.stderr).unwrap();
    assert!(header.contains("config-hash") && header.contains("invocation torsion-probe field classgroup"));
}

#[test]
fn help_exits_zero_everywhere() {
    let groups: &[(&str, &[&str])] = &[
        ("char", &["list", "eval"]),
        ("charsum", &["exact", "bound", "compare"]),
        ("lfun", &["eval", "supnorm", "scan", "certify", "exclude"]),
        ("kernel", &["gaussian", "contour", "window", "prime-sum", "zero-sum", "plan"]),
        ("field", &["disc", "classgroup", "torsion", "split", "ideals", "family"]),
        ("experiment", &["quadratic", "pure-cubic", "hlgr-check"]),
    ];
    assert!(run(&["--help"]).status.success());
    for (group, subs) in groups {
        assert!(run(&[group, "--help"]).status.success(), "{group}");
        for sub in *subs {
            let o = run(&[group, sub, "--help"]);
            assert!(o.status.success(), "{group} {sub}");
            assert!(stdout(&o).contains("Usage"));
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["field", "classgroup"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "c2 = [").unwrap();
    let o = run(&["--config", bad.to_str().unwrap(), "field", "classgroup", "--disc", "-23"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["experiment", "quadratic", "--family-count", "3", "--ell", "3", "--varpi", "0.2"]);
    assert_eq!(o.status.code(), Some(2));
    let fam = dir.path().join("fam.txt");
    std::fs::write(&fam, "-23\nnope\n").unwrap();
    let o = run(&["experiment", "quadratic", "--family-file", fam.to_str().unwrap(), "--ell", "3", "--varpi", "0.1"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["kernel", "gaussian", "--disc", "-4", "--y", "1", "--gaussian-cap", "2980"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn hlgr_check_report() {
    let o = run(&["experiment", "hlgr-check", "--k", "15", "--delta", "1/343", "--ell", "5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["theta"], "9/131071");
    let o = run(&["experiment", "hlgr-check", "--k", "1", "--delta", "0.5", "--ell", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_sets_certify_constant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "c2 = 0.02\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "lfun", "certify", "--modulus", "5", "--index", "2", "--phi", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["c2"], 0.02);
    assert!((v["radius"].as_f64().unwrap() - 0.002).abs() < 1e-15);
}

#[test]
fn cache_env_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let env_path = dir.path().join("env.jsonl");
    let o = Command::new(env!("CARGO_BIN_EXE_torsion-probe"))
        .args(["field", "classgroup", "--disc", "-23"])
        .env("TORSION_PROBE_CACHE", &env_path)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&env_path).unwrap().lines().count(), 1);
    let flag_path = dir.path().join("flag.jsonl");
    let o = Command::new(env!("CARGO_BIN_EXE_torsion-probe"))
        .args(["field", "classgroup", "--disc", "-47", "--cache", flag_path.to_str().unwrap()])
        .env("TORSION_PROBE_CACHE", &env_path)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(flag_path.exists());
    assert_eq!(std::fs::read_to_string(&env_path).unwrap().lines().count(), 1);
}

#[test]
fn csv_and_jsonl_rows() {
    let o = run(&["char", "list", "--modulus", "5"]);
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().starts_with("# torsion-probe"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);
    let o = run(&["char", "list", "--modulus", "5", "--format", "jsonl"]);
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = run(&["field", "family", "--max", "20", "--signature", "imaginary"]);
    assert_eq!(stdout(&o), "-3\n-4\n-7\n-8\n-11\n-15\n-19\n-20\n");
}
