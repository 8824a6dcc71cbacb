use std::fs;

use tongue_lab::asymptotics::fit_contact;
use tongue_lab::circle_map::FamilySpec;
use tongue_lab::tongue::trace_boundary;
use tongue_lab::Fraction;
use tongue_lab_cli::{run_with, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String, String) {
    let (code, out, err) = run_bytes(args);
    (code, String::from_utf8(out).unwrap(), err)
}

fn run_bytes(args: &[&str]) -> (i32, Vec<u8>, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tongue-lab").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, out, String::from_utf8(err).unwrap())
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .parse()
        .unwrap()
}

#[test]
fn trans_encloses_rotation() {
    let (code, out, _) = run(&["trans", "--family", "standard", "--t", "0.3", "--a", "0", "--n", "1000"]);
    assert_eq!(code, EXIT_OK);
    assert!(field(&out, "lo") <= 0.3 && 0.3 <= field(&out, "hi"));
}

#[test]
fn fixed_point_boundary() {
    let (code, out, _) = run(&["boundary", "--family", "standard", "--p", "0", "--q", "1", "--a", "0.1"]);
    assert_eq!(code, EXIT_OK);
    assert!((field(&out, "t_left") + 0.1).abs() < 1e-12);
    assert!((field(&out, "t_right") - 0.1).abs() < 1e-12);
}

#[test]
fn parabolic_half() {
    let (code, out, _) = run(&["parabolic", "--guide", "standard", "--p", "1", "--q", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("\nnu=1\n"), "{out}");
    assert!(out.contains("\nC=-9.8696044010893"), "{out}");
}

#[test]
fn witness_signs() {
    let (code, out, _) = run(&["boundary", "--p", "1", "--q", "2", "--a", "0.05", "--witness"]);
    assert_eq!(code, EXIT_OK);
    assert!(field(&out, "left_g2") < 0.0 && field(&out, "right_g2") > 0.0);
}

#[test]
fn usage_errors_exit_two() {
    let (code, _, err) = run(&["boundary", "--p", "2", "--q", "4", "--a", "0.1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.starts_with("error: NonCoprime:"), "{err}");

    let (code, _, err) = run(&["trans", "--t", "0", "--a", "0.5"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("ParameterOutOfRange"));

    let (code, _, _) = run(&["no-such-command"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, err) = run(&["trans", "--a", "0.1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("missing --t"));
}

#[test]
fn numerical_errors_exit_three() {
    // Widths at a = 0 vanish, so no power law can be fitted.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.csv");
    fs::write(&path, "a,t_left,t_right,width\n0,0.5,0.5,0\n0.1,0.5,0.5,0\n0.2,0.5,0.5,0\n0.3,0.5,0.5,0\n").unwrap();
    let (code, _, err) = run(&["width-fit", "--input", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_NUMERICAL);
    assert!(err.starts_with("error: UnderflowedWidths:"), "{err}");
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("staircase"));
}

#[test]
fn staircase_csv_shape() {
    let (code, out, _) = run(&["staircase", "--a", "0.1", "--steps", "11", "--n", "2000"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t,trans");
    assert_eq!(lines.len(), 12);
    assert!(out.ends_with('\n') && !out.contains('\r'));
    let vals: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-3));
}

#[test]
fn series_and_degree_tables() {
    let (_, out, _) = run(&["series", "--guide", "blaschke", "--p", "0", "--q", "1", "--order", "3"]);
    assert_eq!(out, "k,re,im\n0,0,0\n1,1,0\n2,-1,0\n3,0,0\n");

    let (code, out, err) = run(&["degree-check", "--family", "angle", "--n", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("k,|c_k|\n"));
    assert!(out.contains("\n2,0.25"), "{out}");
    assert!(err.contains("degree_bound_satisfied=false worst_k=2"));
}

#[test]
fn profile_covers_unit_interval() {
    let (code, out, _) = run(&["profile", "--t", "0.2", "--a", "0.05", "--n", "100", "--grid", "9"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "x,phi");
    assert!(lines[1].starts_with("0,") && lines[9].starts_with("1,"));
}

#[test]
fn json_records() {
    let (code, out, _) = run(&["--json", "slopes", "--family", "angle", "--p", "1", "--q", "2"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["M_A"].as_f64().unwrap() - 0.5054755756983956).abs() < 1e-9);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(&path, r#"{ "family": { "kind": "blaschke" }, "p": 0, "q": 1, "a": 0.2 }"#).unwrap();
    let cfg = path.to_str().unwrap();
    let (code, out, _) = run(&["boundary", "--config", cfg]);
    assert_eq!(code, EXIT_OK);
    let want = (0.2f64).asin() / std::f64::consts::PI;
    assert!((field(&out, "t_right") - want).abs() < 1e-12);

    let (_, out, _) = run(&["boundary", "--config", cfg, "--family", "standard", "--a", "0.1"]);
    assert!((field(&out, "t_right") - 0.1).abs() < 1e-12);

    fs::write(&path, r#"{ "colour": 3 }"#).unwrap();
    let (code, _, _) = run(&["boundary", "--config", cfg]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn render_is_deterministic() {
    let args = [
        "render",
        "--mode",
        "mask",
        "--tongue",
        "0/1",
        "--tongue",
        "1/2",
        "--width",
        "60",
        "--height",
        "20",
        "--a-max",
        "0.15",
        "--threads",
        "2",
    ];
    let (code, first, _) = run_bytes(&args);
    assert_eq!(code, EXIT_OK);
    assert!(first.starts_with(b"P5\n# "));
    let (_, second, _) = run_bytes(&args);
    assert_eq!(first, second);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.pgm");
    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    let (code, out, _) = run_bytes(&with_file);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    assert_eq!(fs::read(&path).unwrap(), first);
}

#[test]
fn trace_round_trips_through_width_fit() {
    let a_values = [0.01, 0.02, 0.04, 0.08];
    let (code, csv, _) = run(&["trace", "--p", "1", "--q", "2", "--a-values", "0.01,0.02,0.04,0.08"]);
    assert_eq!(code, EXIT_OK);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    fs::write(&path, &csv).unwrap();
    let (code, out, _) = run(&["width-fit", "--input", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);

    let samples = trace_boundary(&FamilySpec::standard(), Fraction::new(1, 2).unwrap(), &a_values).unwrap();
    let fit = fit_contact(&samples).unwrap();
    assert_eq!(field(&out, "exponent").to_bits(), fit.exponent.to_bits());

    let (_, table, _) = run(&["width-fit", "--input", path.to_str().unwrap(), "--csv"]);
    assert!(table.starts_with("a,width,log_a,log_width\n"));
    assert_eq!(table.lines().count(), 5);
}
