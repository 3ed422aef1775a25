use std::fs;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirror-dce"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field(csv: &str, row: usize, column: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let j = header.iter().position(|h| *h == column).unwrap();
    lines.nth(row).unwrap().split(',').nth(j).unwrap().to_string()
}

#[test]
fn rate_below_threshold_is_zero() {
    let o = bin(&["rate", "--theta", "78", "--k-dq0", "0.03", "--delta", "-0.1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), 0, "rho").parse::<f64>().unwrap(), 0.0);
}

#[test]
fn rate_matches_library_value() {
    use mirror_dce::emission::{rate_direct, EmissionQuery, Method};
    let o = bin(&[
        "rate", "--theta", "78", "--k-dq0", "0.03", "--delta", "1e-3", "--method", "closed-form",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rho: f64 = field(&stdout(&o), 0, "rho").parse().unwrap();
    let q = EmissionQuery::new(78.0, 0.03, 1e-3, Method::ClosedForm).unwrap();
    assert_eq!(rho.to_bits(), rate_direct(&q).unwrap().rho.to_bits());
}

#[test]
fn bad_angle_exits_2_naming_the_flag() {
    let o = bin(&["rate", "--theta", "95", "--k-dq0", "0.03", "--delta", "1e-3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--theta"));
    let o = bin(&["rate", "--theta", "45", "--k-dq0", "-1", "--delta", "1e-3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--k-dq0"));
}

#[test]
fn sweep_defaults_have_expected_rows() {
    let o = bin(&["sweep", "figure1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 401);
    assert!(text.starts_with("delta,rho_perturbative,rho_closed_form,rho_truncated_3,"));

    let o = bin(&["sweep", "figure2"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 90);
    assert!(text.starts_with("theta_deg,delta_s_analytic"));
}

#[test]
fn json_round_trip_through_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.json");
    let o = bin(&["sweep", "figure1", "--count", "50", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 50);
    assert_eq!(doc["meta"]["kind"], "figure1");

    let o = bin(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), 0, "ok"), "true");

    // truncate the rows: the recorded count no longer matches
    let mut doc = doc;
    doc["rows"].as_array_mut().unwrap().pop();
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = bin(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn resonance_values() {
    let o = bin(&["resonance", "--theta", "78", "--k-dq0", "0.03"]);
    assert_eq!(o.status.code(), Some(0));
    let ds: f64 = field(&stdout(&o), 0, "delta_s_analytic").parse().unwrap();
    assert!(((ds - 7.187e-6) / 7.187e-6).abs() < 1e-3);

    let o = bin(&["resonance", "--theta", "78", "--k-dq0", "0.03", "--numeric", "--order", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let numeric: f64 = field(&text, 0, "delta_s_numeric").parse().unwrap();
    assert!(numeric < ds);

    let o = bin(&["resonance", "--theta", "0.0001", "--k-dq0", "0.03"]);
    assert_eq!(o.status.code(), Some(0));
    let tiny: f64 = field(&stdout(&o), 0, "delta_s_analytic").parse().unwrap();
    assert!((0.0..1e-20).contains(&tiny));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "theta = 45.0\nk-dq0 = 0.02\nprecision = 8\n").unwrap();
    let o = bin(&["resonance", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), 0, "theta_deg"), "4.5000000e1");

    let o = bin(&["resonance", "--config", cfg.to_str().unwrap(), "--theta", "78", "--precision", "17"]);
    assert_eq!(field(&stdout(&o), 0, "theta_deg"), "7.8000000000000000e1");

    fs::write(&cfg, "theta = 45.0\nk_dq0 = 0.02\n").unwrap();
    let o = bin(&["resonance", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("k_dq0"));
}

#[test]
fn numerical_failure_exits_3() {
    // at θ = 0.05° the truncated rate has no interior peak near the tiny shift
    let o = bin(&["resonance", "--theta", "0.05", "--k-dq0", "0.03", "--numeric"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn convergence_table() {
    let o = bin(&["convergence", "--theta", "78", "--k-dq0", "0.03", "--delta", "1e-3", "--orders", "1,3,6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4);
    let c3: f64 = field(&text, 1, "change").parse().unwrap();
    let c6: f64 = field(&text, 2, "change").parse().unwrap();
    assert!(c6 < c3);
}
