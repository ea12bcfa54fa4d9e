use std::path::Path;
use std::process::{Command, Output};

fn varper(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varper"))
        .args(args)
        .output()
        .expect("failed to launch varper")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    let prefix = format!("{key}=");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("missing {key} in:\n{text}"))
        .parse()
        .unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn period_forward_power_law() {
    let out = varper(&["period", "--phase", "pow:0.75", "--x", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let expected = (std::f64::consts::TAU).powf(4.0 / 3.0);
    assert!((field(&text, "period") - expected).abs() < 1e-9);
    assert!(text.contains("direction=forward"));
}

#[test]
fn period_accepts_fractional_exponent() {
    let a = stdout(&varper(&["period", "--phase", "pow:4/3", "--x", "15"]));
    let t = field(&a, "period");
    let reference = (15f64.powf(4.0 / 3.0) + std::f64::consts::TAU).powf(0.75) - 15.0;
    assert!((t - reference).abs() < 1e-10);
}

#[test]
fn backward_period_below_threshold_is_a_domain_error() {
    let out = varper(&["period", "--phase", "pow:0.75", "--x", "1", "--backward"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error:"));
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn backward_period_is_consistent_with_forward() {
    let fwd = stdout(&varper(&["period", "--phase", "pow:2", "--x", "3"]));
    let partner = field(&fwd, "partner");
    let arg = format!("{partner}");
    let bwd = stdout(&varper(&[
        "period", "--phase", "pow:2", "--x", &arg, "--backward",
    ]));
    assert!((field(&bwd, "partner") - 3.0).abs() < 1e-9);
    assert!((field(&bwd, "period") - field(&fwd, "period")).abs() < 1e-9);
}

#[test]
fn unknown_flag_exits_with_usage_error() {
    let out = varper(&["period", "--phase", "pow:2", "--x", "1", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_phase_is_rejected() {
    for spec in ["pow:-1", "pow:abc", "wiggle", "powsin:2:1"] {
        let out = varper(&["period", "--phase", spec, "--x", "1"]);
        assert_eq!(out.status.code(), Some(1), "phase {spec}");
    }
}

#[test]
fn gram_classical_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gram.csv");
    let out = varper(&[
        "gram", "--phase", "pow:1", "--x0", "0", "--harmonics", "2", "--out",
        path_str(&path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("basis,1,sin1,cos1,sin2,cos2"));
    let expected = [
        std::f64::consts::TAU,
        std::f64::consts::PI,
        std::f64::consts::PI,
        std::f64::consts::PI,
        std::f64::consts::PI,
    ];
    for (i, line) in lines.enumerate() {
        let cells: Vec<f64> = line.split(',').skip(1).map(|c| c.parse().unwrap()).collect();
        for (j, v) in cells.iter().enumerate() {
            let want = if i == j { expected[i] } else { 0.0 };
            assert!((v - want).abs() < 1e-12, "({i},{j}) = {v}");
        }
    }
    assert!(stdout(&out).contains("segment_length="));
}

#[test]
fn gram_both_methods_agree() {
    let out = varper(&[
        "gram", "--phase", "pow:0.5", "--x0", "0", "--harmonics", "3", "--method", "both",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let summary = String::from_utf8(out.stderr).unwrap();
    assert!(field(&summary, "max_discrepancy") < 1e-6);
    assert!(field(&summary, "max_offdiag_quadrature") < 1e-6);
}

#[test]
fn verify_warped_phase_passes() {
    let out = varper(&["verify", "--phase", "pow:1.3333", "--range", "0:15", "--n", "500"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("status=pass"));
    let d = field(&text, "min_period_derivative");
    assert!(d > -1.0 && d < 0.0);
    assert!(field(&text, "max_periodicity_residual") < 1e-8);
}

#[test]
fn generated_signal_cycle_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sig.csv");
    let p = path_str(&path);
    let gen = varper(&[
        "gen", "--phase", "pow:0.75", "--range", "0:30", "--n", "3000", "--out", p,
    ]);
    assert_eq!(gen.status.code(), Some(0));

    let known = stdout(&varper(&[
        "cycles", "--input", p, "--phase", "pow:0.75", "--harmonic", "1",
    ]));
    let expected = 30f64.powf(0.75) / std::f64::consts::TAU;
    assert!((field(&known, "total") - expected).abs() < 1e-9);
    assert!(known.contains("source=phase"));

    let blind = stdout(&varper(&["cycles", "--input", p]));
    assert!((field(&blind, "total") - expected).abs() < 0.01);
    assert_eq!(field(&blind, "complete"), expected.floor());
}

#[test]
fn expand_then_synth_reproduces_harmonic() {
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("sig.csv");
    let spec = dir.path().join("spec.csv");
    let rec = dir.path().join("rec.csv");
    let phase = "powsin:1.5:0.5:0.5";

    let gen = varper(&[
        "gen", "--phase", phase, "--range", "1:12", "--n", "20000", "--harmonic", "2", "--kind",
        "cosine", "--out", path_str(&sig),
    ]);
    assert_eq!(gen.status.code(), Some(0));

    let exp = varper(&[
        "expand", "--phase", phase, "--x0", "1", "--harmonics", "4", "--input",
        path_str(&sig), "--output", path_str(&spec),
    ]);
    assert_eq!(exp.status.code(), Some(0), "{}", String::from_utf8_lossy(&exp.stderr));
    let text = std::fs::read_to_string(&spec).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    let a2: f64 = rows[2][1].parse().unwrap();
    assert!((a2 - 1.0).abs() < 1e-3, "a2 = {a2}");
    for (m, row) in rows.iter().enumerate().skip(1) {
        let b: f64 = row[2].parse().unwrap();
        assert!(b.abs() < 1e-3, "b{m} = {b}");
    }

    let syn = varper(&[
        "synth", "--phase", phase, "--x0", "1", "--input", path_str(&spec), "--n", "50",
        "--out", path_str(&rec),
    ]);
    assert_eq!(syn.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&rec).unwrap().lines().count(), 51);
}

#[test]
fn expand_rejects_uncovered_segment() {
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("sig.csv");
    varper(&[
        "gen", "--phase", "pow:1", "--range", "0:3", "--n", "100", "--out", path_str(&sig),
    ]);
    let out = varper(&[
        "expand", "--phase", "pow:1", "--x0", "0", "--input", path_str(&sig), "--output",
        path_str(&dir.path().join("spec.csv")),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_csv_reports_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "x,y\n0,1\n1,oops\n").unwrap();
    let out = varper(&["cycles", "--input", path_str(&path)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains('3'), "{err}");
}

#[test]
fn output_is_deterministic() {
    let args = [
        "gram", "--phase", "pow:4/3", "--x0", "5.3", "--harmonics", "4", "--method", "both",
    ];
    let a = varper(&args);
    let b = varper(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn library_entry_point_matches_binary() {
    let args = ["varper", "period", "--phase", "pow:2", "--x", "1.5"];
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = varper_cli::run(args, &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(out, varper(&args[1..]).stdout);
}

#[test]
fn help_exits_cleanly() {
    let out = varper(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("gram"));
}
