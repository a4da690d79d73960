use std::path::Path;
use std::process::{Command, Output};

use exosynth::report::read_csv;

fn exosynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exosynth")).args(args).output().unwrap()
}

fn small_space(out: &Path) -> Vec<String> {
    let mut v: Vec<String> = ["optimize", "--out"].iter().map(|s| s.to_string()).collect();
    v.push(out.display().to_string());
    for r in ["L_EJ=36:38", "L_CI=16:17", "L_CD=10:11", "L_ED=31:33", "L_EF=29:31", "L_BC=41:42"] {
        v.push("--range".into());
        v.push(r.into());
    }
    v
}

#[test]
fn solve_prints_one_row_of_unknowns() {
    let out = exosynth(&["solve", "--mcp", "40", "--pip", "45"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "mcp,pip,l_x,c_1,c_2,q_B,q_D,q_G,q_K,q_N");
    assert_eq!(lines.len(), 2);
    let row: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[2] - 21.788510801453136).abs() < 1e-9);
    assert!((row[8] - 106.50258593333669).abs() < 1e-9);
    assert!(!text.contains('\r'));
}

#[test]
fn geometry_file_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("g.cfg");
    std::fs::write(&cfg, exosynth::config::REFERENCE_GEOMETRY).unwrap();
    let out = exosynth(&["jacobian", "--geometry", cfg.to_str().unwrap(), "--mcp", "40", "--pip", "45", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("jacobian.csv")).unwrap();
    assert_eq!(header, ["mcp", "pip", "j11", "j12", "j21", "j22", "condition"]);
    let j11: f64 = rows[0][2].parse().unwrap();
    assert!((j11 + 0.235754354213435).abs() < 1e-9);
}

#[test]
fn statics_grid_covers_workspace() {
    let out = exosynth(&["statics", "--grid", "--force", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 91);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",stable")));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = exosynth(&["solve", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn missing_pose_is_a_usage_error() {
    assert_eq!(exosynth(&["solve", "--mcp", "10"]).status.code(), Some(2));
}

#[test]
fn bad_geometry_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "L_AB = 20\nL_XX = 3\n").unwrap();
    let out = exosynth(&["solve", "--geometry", cfg.to_str().unwrap(), "--mcp", "0", "--pip", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cfg"));
}

#[test]
fn unclosable_geometry_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("long_gf.cfg");
    let text = exosynth::config::REFERENCE_GEOMETRY.replace("L_GF = 36", "L_GF = 300");
    std::fs::write(&path, text).unwrap();
    let out = exosynth(&["solve", "--geometry", path.to_str().unwrap(), "--mcp", "40", "--pip", "45"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
}

#[test]
fn empty_feasible_set_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = exosynth(&[
        "optimize", "--out", d, "--range", "L_EJ=30", "--range", "L_CI=20", "--range", "L_CD=20", "--range", "L_ED=30",
        "--range", "L_EF=20", "--range", "L_BC=36",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no feasible candidate"));
    assert!(!dir.path().join("ranked.csv").exists());
}

#[test]
fn optimize_writes_ranked_summary_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    let args = small_space(dir.path());
    let out = exosynth(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("ranked.csv")).unwrap();
    assert_eq!(
        header,
        ["candidate_id", "L_EJ", "L_CI", "L_CD", "L_ED", "L_EF", "L_BC", "p", "min_ratio", "max_ratio", "max_lx", "max_c1", "max_c2"]
    );
    let p: Vec<f64> = rows.iter().map(|r| r[7].parse().unwrap()).collect();
    assert!(p.windows(2).all(|w| w[0] >= w[1]));
    let (h, summary) = read_csv(&dir.path().join("summary.csv")).unwrap();
    assert_eq!(h, ["key", "value"]);
    assert_eq!(summary[0], ["total", "216"]);
    let (_, curve) = read_csv(&dir.path().join("curve.csv")).unwrap();
    assert_eq!(curve.len(), rows.len());
}

#[test]
fn optimize_is_thread_count_independent() {
    let run = |threads: &str| {
        let dir = tempfile::tempdir().unwrap();
        let args = small_space(dir.path());
        let out = Command::new(env!("CARGO_BIN_EXE_exosynth"))
            .args(&args)
            .env("EXOSYNTH_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(dir.path().join("ranked.csv")).unwrap()
    };
    assert_eq!(run("1"), run("8"));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let args = small_space(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_exosynth"))
        .args(&args)
        .env("EXOSYNTH_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sensitivity_writes_records_and_bars() {
    let dir = tempfile::tempdir().unwrap();
    let out = exosynth(&["sensitivity", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("sensitivity.csv")).unwrap();
    assert_eq!(header[0], "parameter");
    assert_eq!(header.last().unwrap(), "retained");
    assert!(rows.iter().any(|r| r[0] == "L_AB" && r[10] == "false"));
    let (bars, _) = read_csv(&dir.path().join("sensitivity_bars.csv")).unwrap();
    assert_eq!(bars, ["parameter", "SI_c1", "SI_c2"]);
}

#[test]
fn simulate_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = exosynth(&["simulate", "--radius", "35", "--travel", "0.7", "--steps", "35", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("trace.csv")).unwrap();
    assert_eq!(header, ["step", "l_x", "theta_mcp", "theta_pip", "f_proximal", "f_intermediate", "energy"]);
    assert_eq!(rows.len(), 71);
    assert!(rows.iter().any(|r| r[5].parse::<f64>().unwrap() > 0.0));
}

#[test]
fn help_exits_zero() {
    let out = exosynth(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["solve", "jacobian", "statics", "sensitivity", "optimize", "simulate"] {
        assert!(text.contains(sub));
    }
}
