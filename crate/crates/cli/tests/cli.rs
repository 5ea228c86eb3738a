//! End-to-end behaviour of the binary: outputs, exit codes and configuration.

use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_degennes"));
    cmd.current_dir(dir).args(args).env_remove("DEGENNES_NUM_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn table(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn summary<'a>(text: &'a str, key: &str) -> &'a str {
    let prefix = format!("# {key} = ");
    text.lines()
        .find_map(|l| l.strip_prefix(prefix.as_str()))
        .unwrap_or_else(|| panic!("no summary key {key}"))
}

#[test]
fn band_writes_the_default_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["band"], &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("band.csv")).unwrap();
    let rows = table(&text);
    assert_eq!(rows[0], ["xi", "mu_1", "mu_2", "mu_3", "gap_1", "gap_2"]);
    assert_eq!(rows.len(), 1 + 121);
    let zero = rows.iter().find(|r| r[0] == "0.000000000000e+00").unwrap();
    assert!((zero[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
    assert!((zero[3].parse::<f64>().unwrap() - 9.0).abs() < 1e-9);
    assert!(summary(&text, "theta0").starts_with("5.9010612"));
}

#[test]
fn stdout_flag_echoes_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("b.csv");
    let out = run(
        dir.path(),
        &["band", "--from", "0", "--to", "1", "--step", "0.5", "--stdout", "--out", target.to_str().unwrap()],
        &[],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(out.stdout, std::fs::read(&target).unwrap());
}

#[test]
fn json_numbers_are_strings() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["--format", "json", "band", "--from", "0", "--to", "1", "--step", "0.5"], &[]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(dir.path().join("band.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["xi"], "0.000000000000e+00");
    assert_eq!(rows[0]["mu_1"].as_str().unwrap().len(), "1.000000000000e+00".len());
    assert!(v["summary"]["theta0"].is_string());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["band", "--step", "0"][..],
        &["band", "--from", "3", "--to", "1"],
        &["montgomery", "--n", "0"],
        &["--scheme", "spectral", "band"],
        &["nonsense"],
        &["--truncation", "-1", "band"],
        &["extend", "--eps", "0.9"],
        &["asymptotics", "--side", "minus", "--points", "1"],
        &["--config", "missing.toml", "band"],
    ] {
        let out = run(dir.path(), args, &[]);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = run(dir.path(), &["band"], &[("DEGENNES_NUM_THREADS", "zero")]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&run(dir.path(), &["--help"], &[])), 0);
}

#[test]
fn thread_cap_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["band", "--from", "-1", "--to", "1", "--step", "0.25", "--stdout", "--out", "x.csv"];
    let a = run(dir.path(), &args, &[("DEGENNES_NUM_THREADS", "1")]);
    let b = run(dir.path(), &args, &[("DEGENNES_NUM_THREADS", "4")]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "scheme = \"fd\"\nn_points = 400\nfrom = 0.0\nto = 1.0\nstep = 0.5\nk = 2\nside = \"minus\"\n",
    )
    .unwrap();
    let out = run(dir.path(), &["--config", "run.toml", "--n-points", "800", "band", "--stdout"], &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(summary(&text, "scheme"), "fd");
    assert_eq!(summary(&text, "n_points"), "800");
    assert_eq!(summary(&text, "k"), "2");
    assert_eq!(table(&text).len(), 1 + 3);

    std::fs::write(dir.path().join("bad.toml"), "colour = \"blue\"\n").unwrap();
    assert_eq!(code(&run(dir.path(), &["--config", "bad.toml", "band"], &[])), 2);
}

#[test]
fn theta0_reports_both_schemes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["theta0", "--stdout"], &[]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = table(&text);
    assert_eq!(rows[0], ["theta0", "xi0", "feynman_hellmann_residual", "scheme_agreement"]);
    let theta0: f64 = rows[1][0].parse().unwrap();
    let agreement: f64 = rows[1][3].parse().unwrap();
    assert!((theta0 - 0.590_106_125).abs() < 1e-8);
    assert!(agreement < 1e-6);
    assert_eq!(summary(&text, "reference_scheme"), "fd");
}

#[test]
fn asymptotics_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["asymptotics", "--side", "minus", "--points", "5,10,15", "--stdout"], &[]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let nu: f64 = summary(&text, "nu").parse().unwrap();
    assert!((nu - 1.617_233_035).abs() < 1e-8);
    let errors: Vec<f64> = table(&text)[1..].iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]));

    let out = run(dir.path(), &["asymptotics", "--side", "plus", "--points", "1,2,4,6", "--stdout"], &[]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(summary(&text, "monotone"), "true");
}

#[test]
fn extend_beyond_the_strip_needs_an_override() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "extend", "--re-from", "0.5", "--re-to", "1", "--re-step", "0.5", "--eps", "0.9", "--im-step", "0.3", "--max-eps", "1", "--stdout",
    ];
    let out = run(dir.path(), &args, &[]);
    // points past the coercivity bound cannot be certified
    assert_eq!(code(&out), 3);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(table(&text).len(), 1 + 2 * 7);
    assert_eq!(summary(&text, "passed"), "false");
    assert!(summary(&text, "coercivity_failures").parse::<usize>().unwrap() > 0);
}

#[test]
fn small_extend_sweep_passes() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "extend", "--re-from", "0.5", "--re-to", "1", "--re-step", "0.1", "--eps", "0.1", "--stdout",
    ];
    let out = run(dir.path(), &args, &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = table(&text);
    assert_eq!(rows.len(), 1 + 6 * 5);
    assert!(rows[1..].iter().all(|r| r[7] == "ok"));
    // reflection: rows are ordered by Re then Im, so row i and its mirror share Re
    for group in rows[1..].chunks(5) {
        assert_eq!(group[0][2], group[4][2]);
        assert_eq!(group[0][3].trim_start_matches('-'), group[4][3].trim_start_matches('-'));
    }
}

#[test]
fn montgomery_band() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["montgomery", "--n", "1", "--k", "2", "--stdout"], &[]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = table(&text);
    let mu1: f64 = rows[1][1].parse().unwrap();
    let gap: f64 = rows[1][3].parse().unwrap();
    assert!(mu1 > 0.0 && gap > 1e-7);
}
