use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_interior-svd")).args(args).output().unwrap()
}

fn diag_args(output: &str) -> Vec<String> {
    let m = fixture("diag10.mtx");
    ["--matrix", m.to_str().unwrap(), "--tau", "4.4", "--k", "1", "--m", "8", "--output", output]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn run_owned(args: &[String]) -> Output {
    run(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn json_report_for_diagonal_fixture() {
    let out = run_owned(&diag_args("json"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["sigma"][0].as_f64().unwrap() - 4.0).abs() < 1e-8);
    assert_eq!(v["converged"], true);
    for key in ["residual", "iter", "mv", "time_sec", "stopcrit"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn csv_and_json_carry_identical_values() {
    let json: serde_json::Value = serde_json::from_slice(&run_owned(&diag_args("json")).stdout).unwrap();
    let csv = String::from_utf8(run_owned(&diag_args("csv")).stdout).unwrap();
    let mut sections = csv.split("\n\n");
    let triplets: Vec<&str> = sections.next().unwrap().lines().collect();
    assert_eq!(triplets[0], "index,sigma,residual");
    let cells: Vec<f64> = triplets[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(cells[1], json["sigma"][0].as_f64().unwrap());
    assert_eq!(cells[2], json["residual"][0].as_f64().unwrap());
    let summary: Vec<&str> = sections.next().unwrap().lines().collect();
    assert_eq!(summary[0], "iter,mv,time_sec,stopcrit,converged");
    let cells: Vec<&str> = summary[1].split(',').collect();
    assert_eq!(cells[0].parse::<u64>().unwrap(), json["iter"].as_u64().unwrap());
    assert_eq!(cells[1].parse::<u64>().unwrap(), json["mv"].as_u64().unwrap());
    assert_eq!(cells[3].parse::<f64>().unwrap(), json["stopcrit"].as_f64().unwrap());
    assert_eq!(cells[4], "true");
}

#[test]
fn history_has_one_row_per_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("history.csv");
    let mut args = diag_args("json");
    let k = args.iter().position(|a| a == "--k").unwrap();
    args[k + 1] = "2".into();
    args.extend(["--history".to_string(), path.to_str().unwrap().to_string()]);
    let out = run_owned(&args);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "restart,eps_1,eps_2");
    assert_eq!(lines.len() as u64, v["iter"].as_u64().unwrap() + 2);
    for (i, line) in lines[1..].iter().enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[0], i.to_string());
        assert!(cells[1..].iter().all(|c| c.parse::<f64>().is_ok()));
    }
}

#[test]
fn zero_k_is_a_usage_error() {
    let m = fixture("diag10.mtx");
    let out = run(&["--matrix", m.to_str().unwrap(), "--k", "0", "--m", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_matrix_names_the_path() {
    let out = run(&["--matrix", "missing.mtx", "--k", "1", "--m", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.mtx"));
}

#[test]
fn invalid_numbers_and_requests_exit_with_one() {
    let m = fixture("diag10.mtx");
    let m = m.to_str().unwrap();
    for args in [
        vec!["--matrix", m, "--k", "1", "--m", "8", "--tau", "abc"],
        vec!["--matrix", m, "--k", "1", "--m", "8", "--tau=-1"],
        vec!["--matrix", m, "--k", "10", "--m", "10"],
        vec!["--matrix", m, "--k", "1", "--m", "8", "--output", "xml"],
    ] {
        assert_eq!(run(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn unconverged_run_exits_with_two() {
    let mut args = diag_args("table");
    args.extend(["--max-restarts".into(), "0".into(), "--tol".into(), "1e-15".into()]);
    let out = run_owned(&args);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("converged: false"));
}

#[test]
fn help_exits_cleanly() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--matrix"));
}

#[test]
fn malformed_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.mtx");
    std::fs::write(&path, "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n").unwrap();
    let out = run(&["--matrix", path.to_str().unwrap(), "--k", "1", "--m", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported"));
}
