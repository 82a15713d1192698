use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL_GRID: &str = "grid.radial = 100\ngrid.polar = 48\ngrid.azimuthal = 16\n";

fn bwdelay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bwdelay"))
        .args(args)
        .env("BWDELAY_THREADS", "1")
        .output()
        .expect("failed to launch bwdelay")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p1.cfg",
        &format!("preset = fig3-blue\ndelay.values = 0, 1.4, 3.2, 4.5\n{SMALL_GRID}"),
    );
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        let out = bwdelay(&["sweep", "--config", &cfg, "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);

    let text = String::from_utf8(ta).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# bwdelay ratio fingerprint="));
    assert_eq!(lines[1], "D_lambda_e,ratio,P_double,P_first_single,P_second_single");
    assert_eq!(lines.len(), 6);
    let r0: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!((r0 - 0.98).abs() < 0.05, "R(0) = {r0}");
}

#[test]
fn spectrum_columns_follow_the_delays() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig2.cfg", &format!("preset = fig2\n{SMALL_GRID}"));
    let out_path = dir.path().join("out/spec.csv");
    let out = bwdelay(&["spectrum", "--config", &cfg, "--out", out_path.to_str().unwrap(), "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&out_path).unwrap();
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "p_over_m,dP_dp_single,dP_dp_double_D0,dP_dp_double_D0.06L,dP_dp_double_D0.13L"
    );
    assert_eq!(text.lines().count(), 2 + 100);

    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_path.with_extension("json")).unwrap()).unwrap();
    assert_eq!(meta["command"], "spectrum");
    assert_eq!(meta["grid"]["radial"], 100);
    let fp = meta["fingerprint"].as_str().unwrap();
    assert!(text.starts_with(&format!("# bwdelay spectrum fingerprint={fp}\n")));
}

#[test]
fn total_of_a_single_pulse_goes_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "single.cfg", &format!("preset = p1\n{SMALL_GRID}"));
    let out = bwdelay(&["total", "--config", &cfg]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text.lines().nth(2).unwrap().parse().unwrap();
    assert!(value > 0.0);
}

#[test]
fn invalid_xi_reports_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "pulse1.xi = -0.1\n");
    let out = bwdelay(&["sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.starts_with("error[validation-error]"), "{err}");
    assert!(err.contains("pulse1.xi"), "{err}");
}

#[test]
fn malformed_line_reports_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "gamma.omega = 1.01\npulse1.omega fast\n");
    let out = bwdelay(&["total", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.starts_with("error[parse-error]") && err.contains("line 2"), "{err}");
}

#[test]
fn sweep_needs_two_pulses() {
    let out = bwdelay(&["sweep", "--preset", "p1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("needs two pulses"));
}

#[test]
fn unknown_preset_and_coarse_grid_are_rejected() {
    let out = bwdelay(&["sweep", "--preset", "fig9"]);
    assert!(stderr(&out).starts_with("error[validation-error]"));
    let out = bwdelay(&["total", "--preset", "p1", "--grid-scale", "0.25"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error[validation-error]"), "{}", stderr(&out));
}

#[test]
fn model_writes_curve_and_energy_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p1.cfg",
        &format!("preset = fig3-blue\ndelay.start = 0\ndelay.stop = 2\ndelay.step = 0.5\n{SMALL_GRID}"),
    );
    let out_path = dir.path().join("model.csv");
    let out = bwdelay(&["model", "--config", &cfg, "--out", out_path.to_str().unwrap(), "--estimate", "fit"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read_to_string(&out_path).unwrap().lines().count(), 2 + 5);
    let hist = fs::read_to_string(out_path.with_extension("energy.csv")).unwrap();
    assert!(hist.contains("# mean_E_L="));
    assert!(hist.contains("E_L,probability\n"));
}

#[test]
fn exchange_writes_both_orders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig4.cfg", &format!("preset = fig4\ndelay.values = 0.75\n{SMALL_GRID}"));
    let out_path = dir.path().join("exchange.csv");
    let out = bwdelay(&["exchange", "--config", &cfg, "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "D_lambda_e,P_ab,P_ba,P_a,P_b,residual");
    let residual: f64 = text.lines().nth(2).unwrap().split(',').nth(5).unwrap().parse().unwrap();
    assert!(residual < 0.02);
    let reversed = fs::read_to_string(out_path.with_extension("reversed.csv")).unwrap();
    let r_ba: f64 = reversed.lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(r_ba > 1.0, "R_BA(0.75) = {r_ba}");
}
