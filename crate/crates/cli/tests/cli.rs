use std::path::Path;
use std::process::{Command, Output};

fn mpemba(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpemba"))
        .args(args)
        .current_dir(dir)
        .env_remove("MPEMBA_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn spectrum_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = mpemba(dir.path(), &["spectrum", "--tau", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let kinds: Vec<&str> = text.lines().skip(1).take(4).map(|l| l.split('\t').next_back().unwrap()).collect();
    assert_eq!(kinds, ["stationary", "coherence", "coherence", "population"]);
    let re: Vec<f64> = text
        .lines()
        .skip(1)
        .take(4)
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!((re[1] / re[3] - 0.5).abs() < 1e-9);
    assert!(text.contains("fixed point populations: 0.69816488819"));
}

#[test]
fn spectrum_at_full_delay_is_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = mpemba(dir.path(), &["spectrum", "--tau", "2.3245002324500232"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("singular"));
}

#[test]
fn surface_grid_and_consistency_with_cooling() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(mpemba(dir.path(), &["surface"]).status.code(), Some(0));
    assert_eq!(mpemba(dir.path(), &["cooling"]).status.code(), Some(0));
    let surface = read_csv(&dir.path().join("surface.csv"));
    assert_eq!(surface[0], ["theta_rad", "tau_ms", "delta_f_neq_khz"]);
    assert_eq!(surface.len(), 1 + 73 * 64);
    let cooling = read_csv(&dir.path().join("cooling.csv"));
    assert_eq!(surface[1][2], cooling[1][1]);
}

#[test]
fn cooling_summary_reports_persistent_crossing() {
    let dir = tempfile::tempdir().unwrap();
    let o = mpemba(dir.path(), &["cooling", "--format", "json", "--out", "c.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("crossing detected, persistent"));
    let json = std::fs::read_to_string(dir.path().join("c.json")).unwrap();
    assert!(json.trim_start().starts_with('[') && json.contains("\"delta_f_mb_khz\""));
}

#[test]
fn no_mpemba_flag_drops_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let o = mpemba(dir.path(), &["cooling", "--no-mpemba", "--tau-steps", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = read_csv(&dir.path().join("cooling.csv"));
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0].len(), 4);
}

#[test]
fn otto_commands_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = mpemba(dir.path(), &["otto-distance"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("otto-distance: crossing at tau2 ="));
    let o = mpemba(dir.path(), &["otto-ratio", "--tau-steps", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = read_csv(&dir.path().join("otto_ratio.csv"));
    assert_eq!(rows[0], ["delta", "tau2_plain_ms", "tau2_mb_ms", "ratio"]);
    assert_eq!(rows.len(), 21);
    for r in &rows[1..] {
        assert!(r[3].parse::<f64>().unwrap() >= 1.0 - 1e-12);
    }
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    mpemba(dir.path(), &["surface", "--out", "a.csv", "--theta-steps", "9"]);
    mpemba(dir.path(), &["surface", "--out", "b.csv", "--theta-steps", "9"]);
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.csv")).unwrap());
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = mpemba(dir.path(), &["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verify: 9/9 checks passed"));

    std::fs::write(dir.path().join("neg.ini"), "[cycle]\nt_hot_khz = -4.77\n").unwrap();
    let o = mpemba(dir.path(), &["verify", "--config", "neg.ini"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL cptp"));

    std::fs::write(dir.path().join("same.ini"), "nu0_khz = 2\nnu1_khz = 2\n").unwrap();
    let o = mpemba(dir.path(), &["verify", "--config", "same.ini"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_from_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("env.ini"), "[grid]\ntau_steps = 5\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_mpemba"))
        .args(["otto-distance"])
        .current_dir(dir.path())
        .env("MPEMBA_CONFIG", dir.path().join("env.ini"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_csv(&dir.path().join("otto_distance.csv")).len(), 6);
}

#[test]
fn bad_inputs_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("unk.ini"), "colour = blue\n").unwrap();
    assert_eq!(mpemba(dir.path(), &["cooling", "--config", "unk.ini"]).status.code(), Some(2));
    assert_eq!(mpemba(dir.path(), &["cooling", "--populations", "0.3,0.6"]).status.code(), Some(2));
    assert_eq!(mpemba(dir.path(), &["cooling", "--config", "missing.ini"]).status.code(), Some(3));
    let o = mpemba(dir.path(), &["surface", "--out", "no/such/dir/s.csv"]);
    assert_eq!(o.status.code(), Some(3));
}
