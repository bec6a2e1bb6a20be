use std::process::Command;

fn entpur(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_entpur"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

#[test]
fn bell_run_prints_csv() {
    let out = entpur(&["bell", "--code", "five_qubit", "--p", "0,0.02", "--max-trials", "300", "--no-timing"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("protocol,code_name,n,k,p,trials"));
    assert!(lines[1].starts_with("bell,five_qubit,5,1,0.0,300,300,0,0,0.0,0.0,0.0,1,0.0,"));
}

#[test]
fn flags_override_config_file() {
    let dir = std::env::temp_dir().join(format!("entpur-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "protocol = ghz1\ncode = five_qubit\np = 0.5\nmax-trials = 50\nplacement = alice\n").unwrap();
    let out_csv = dir.join("out.csv");
    let cfg_s = cfg.to_str().unwrap();
    let out_s = out_csv.to_str().unwrap();
    let args = ["ghz1", "--config", cfg_s, "--p", "0.01", "--out", out_s, "--no-timing"];
    let first = entpur(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = entpur(&args);
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("ghz1,five_qubit,5,1,0.01,50,"), "{text}");
    let file = std::fs::read_to_string(&out_csv).unwrap();
    assert_eq!(file.lines().count(), 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_protocol_must_match_command() {
    let dir = std::env::temp_dir().join(format!("entpur-cli-proto-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "protocol = ghz2\n").unwrap();
    let out = entpur(&["bell", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn logicals_and_verify() {
    let out = entpur(&["logicals", "--code", "five_qubit"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("logical_z  +ZZZZZ") && text.contains("logical_x  -YIZZI"), "{text}");
    let out = entpur(&["verify", "--seed", "5"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("0 above 1e-10"));
}

#[test]
fn threshold_reads_csv() {
    let dir = std::env::temp_dir().join(format!("entpur-cli-thr-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("bench.csv");
    let csv_s = csv.to_str().unwrap();
    for code in ["steane", "toric3"] {
        let out = entpur(&["decode-bench", "--code", code, "--p", "0.05,0.2", "--max-trials", "400", "--out", csv_s]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let out = entpur(&["threshold", csv_s]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("threshold in") || text.starts_with("no crossing"), "{text}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unknown_code_is_an_error() {
    let out = entpur(&["bell", "--code", "no_such_code", "--max-trials", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_code"));
}
