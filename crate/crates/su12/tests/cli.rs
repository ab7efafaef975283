use std::path::Path;
use std::process::{Command, Output};

fn su12(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_su12")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn lie_verify_passes_and_catches_a_flipped_sign() {
    let ok = su12(&["lie-verify"]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    let text = stdout(&ok);
    assert_eq!(text.lines().filter(|l| l.contains("bracket")).filter(|l| l.starts_with("PASS")).count(), 28);
    assert!(!text.contains("FAIL"));

    let bad = su12(&["lie-verify", "--set", "flip_bracket=3,5"]);
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("FAIL"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&su12(&["sensitivity", "--config", "/nonexistent/su12.conf"])), 2);
    assert_eq!(code(&su12(&["sensitivity", "--set", "beta9=1"])), 2);
    assert_eq!(code(&su12(&["sensitivity", "--set", "beta1=abc"])), 2);
    assert_eq!(code(&su12(&["sensitivity", "--set", "s=0", "--set", "r=0"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&su12(&["figure", "3", "--set", "beta1=0", "--set", "beta2=0", "--out", out])), 2);
    assert_eq!(code(&su12(&["figure", "9"])), 2);
}

#[test]
fn sensitivity_reports_the_default_point() {
    let o = su12(&["sensitivity"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("status = OK"), "{text}");
    let line = text.lines().find(|l| l.starts_with("delta_phi = ")).unwrap();
    let v: f64 = line["delta_phi = ".len()..].parse().unwrap();
    assert!((v - 0.0173912).abs() < 1e-6, "{v}");
}

#[test]
fn sum_estimator_matches_its_closed_form() {
    let o = su12(&["sensitivity", "--set", "t=1", "--set", "r=0"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let get = |k: &str| -> f64 {
        let prefix = format!("{k} = ");
        text.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap_or_else(|| panic!("{k} missing in {text}")).parse().unwrap()
    };
    let (v, r) = (get("delta_phi"), get("ref_sum_estimator_limit"));
    assert!((v - r).abs() <= 1e-10 * r, "{v} vs {r}");
}

#[test]
fn divergent_point_is_reported_not_an_error() {
    let o = su12(&["sensitivity", "--set", "alpha1_re=5", "--set", "t=0", "--set", "r=0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("DIVERGENT"));
}

#[test]
fn oracle_guard_and_report() {
    let o = su12(&["oracle-check", "--set", "cases=5"]);
    let text = stdout(&o);
    for row in ["mean", "covariance", "estimator_variance", "derivative", "vacuum_k_variance"] {
        assert!(text.contains(&format!(" {row}: max deviation")), "{row} missing in {text}");
    }
    assert!(code(&o) == 0 || code(&o) == 1);
    assert_eq!(code(&su12(&["oracle-check", "--set", "cases=2", "--set", "beta=2"])), 3);
}

#[test]
fn figure_tables_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    for d in [&a, &b] {
        let o = su12(&["figure", "4", "--set", "ratio_points=11", "--no-timestamp", "--out", d.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let first = read(&a.join("fig4.csv"));
    assert_eq!(first, read(&b.join("fig4.csv")));
    assert!(first.contains("#= ratio_points = 11"));
    assert_eq!(first.lines().filter(|l| !l.starts_with('#')).count(), 1 + 121);

    // the table carries its own parameters
    let cfg = a.join("fig4.csv");
    let o = su12(&["figure", "4", "--config", cfg.to_str().unwrap(), "--no-timestamp", "--out", c.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(first, read(&c.join("fig4.csv")));
    assert!(read(&c.join("summary.txt")).contains("argmin_t_over_s"));
}

#[test]
fn timestamp_is_recorded_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let o = su12(&["figure", "3", "--set", "phi_points=5", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(read(&dir.path().join("fig3.csv")).contains("# generated at unix time "));
}

#[test]
fn optimize_finds_the_vacuum_optimum() {
    let o = su12(&["optimize"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let v: f64 = text.lines().find_map(|l| l.strip_prefix("delta_phi = ")).unwrap().parse().unwrap();
    assert!((v - 0.0166007).abs() < 1e-6, "{v}");
}
