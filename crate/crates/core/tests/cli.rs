use std::process::{Command, Output};

use morse_spectral::asian::{price_spec, put_price, MarketParams};
use serde_json::Value;

const STANDARD: [&str; 10] = ["--s0", "2", "--strike", "2", "--rate", "0.05", "--sigma", "0.5", "--expiry", "1"];

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_morse-spectral"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("THREADS", t),
        None => cmd.env_remove("THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn with_standard<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(STANDARD.iter()).chain(tail.iter()).copied().collect()
}

#[test]
fn price_json_round_trips() {
    let out = run(&with_standard(&["price"], &[]), None);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for field in ["price", "discrete_part", "continuum_part", "n_terms", "quad_error", "nu", "tau", "k", "clamped"] {
        assert!(v.get(field).is_some(), "missing {field}");
    }
    let m = MarketParams::new(2.0f64, 2.0, 0.05, 0.5, 1.0).unwrap();
    let b = put_price(&m, &price_spec().with_tolerances(1e-12, 1e-14)).unwrap();
    assert_eq!(v["price"].as_f64().unwrap().to_bits(), b.price.to_bits());
    assert_eq!(v["n_terms"].as_u64(), Some(1));
    assert_eq!(v["nu"].as_f64(), Some(b.reduced.nu));
    assert_eq!(v["clamped"].as_bool(), Some(false));
}

#[test]
fn spectrum_lists_bound_states() {
    let out = run(&["spectrum", "--kappa", "2.3"], None);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 2);
    assert_eq!(list[0]["n"].as_u64(), Some(0));
    assert!((list[0]["lambda"].as_f64().unwrap() + 3.24).abs() < 1e-12);
    assert!((list[1]["lambda"].as_f64().unwrap() + 0.64).abs() < 1e-12);

    let out = run(&["spectrum", "--kappa", "0.4", "--format", "csv"], None);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "n,lambda\n");
}

#[test]
fn csv_output_has_a_header_and_one_row() {
    let out = run(&with_standard(&["price"], &["--format", "csv"]), None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("price,discrete_part,continuum_part,n_terms,quad_error,nu,tau,k"));
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
}

#[test]
fn errors_map_to_exit_codes_and_name_the_parameter() {
    let out = run(&["price", "--s0", "-2", "--strike", "2", "--rate", "0.05", "--sigma", "0.3", "--expiry", "1"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("s0"));

    let out = run(&["price", "--s0", "2", "--strike", "2", "--rate", "0.18", "--sigma", "0.3", "--expiry", "1"], None);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nu"));

    let out = run(&with_standard(&["price"], &["--tol", "0"]), None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tol"));

    let out = run(&with_standard(&["mc"], &["--steps", "1"]), None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_steps"));

    let out = run(&["spectrum"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["spectrum", "--kappa", "2.3"], Some("zero"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("THREADS"));
}

#[test]
fn monte_carlo_output_ignores_thread_count() {
    let args = with_standard(&["mc"], &["--paths", "20000", "--steps", "32", "--seed", "9"]);
    let one = run(&args, Some("1"));
    let four = run(&args, Some("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let v: Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v["n_effective"].as_u64(), Some(10_000));
    assert!(v["std_error"].as_f64().unwrap() > 0.0);
}

#[test]
fn kernel_and_reconstruct_emit_json() {
    let out = run(&with_standard(&["kernel"], &["--points", "5"]), None);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 5);

    let out = run(&["reconstruct", "--kappa", "2.3", "--x0", "0.7", "--tol", "1e-4"], None);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["relative_l2_error"].as_f64().unwrap() < 1e-3);
    assert_eq!(v["discrete"].as_array().unwrap().len(), 2);
}

#[test]
fn validate_reports_on_stderr_and_json_on_stdout() {
    let out = run(&["validate", "--case", "low-vol", "--paths", "20000", "--steps", "64"], None);
    let code = out.status.code().unwrap();
    assert!(code == 0 || code == 1, "exit {code}");
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 5);
    let all_pass = checks.iter().all(|c| c["pass"].as_bool().unwrap());
    assert_eq!(v["all_pass"].as_bool(), Some(all_pass));
    assert_eq!(code == 0, all_pass);
    let table = String::from_utf8(out.stderr).unwrap();
    for c in checks {
        assert!(table.contains(c["name"].as_str().unwrap()));
    }
}
