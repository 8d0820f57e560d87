use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use fixpoint_core::csvio::{read_numeric_table, read_traces};
use fixpoint_core::SchemeKind;

fn run(cmd: &str, config: &str, out: &Path, extra: &[&str]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fixpoint"))
        .args([cmd, "--config", "-", "--out"])
        .arg(out)
        .args(extra)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(config.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn compare_twenty_iterations_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        "compare",
        r#"{"problem": "cuberoot", "max_iter": 20, "stop_at_tol": false}"#,
        dir.path(),
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = read(dir.path(), "compare.csv");
    assert!(text.starts_with("n,scheme,x,err,residual\n"));
    assert!(!text.contains('\r'));
    let rows = read_traces(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 8 * 21);
    for k in SchemeKind::ALL {
        assert_eq!(rows.iter().filter(|r| r.scheme == k).count(), 21);
    }
    let out = stdout(&o);
    let ordering = out.lines().find(|l| l.starts_with("ordering: ")).unwrap();
    assert!(ordering.starts_with("ordering: NewTwoStep < "), "{ordering}");
    let gp = read(dir.path(), "compare.gp");
    assert!(gp.contains("set logscale y") && gp.contains("'compare.csv'"));
}

#[test]
fn compare_from_fixed_point_stops_at_once() {
    let dir = tempfile::tempdir().unwrap();
    let p = fixpoint_core::problems::cuberoot().map.fixed_point().copied().unwrap();
    let cfg = format!(r#"{{"problem": "cuberoot", "x0": {p:?}}}"#);
    let o = run("compare", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_traces(read(dir.path(), "compare.csv").as_bytes()).unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.n == 0 && r.err == Some(0.0)));
}

#[test]
fn compare_linear_picard_is_geometric() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        "compare",
        r#"{"problem": "linear-0.5", "schemes": ["Picard"], "max_iter": 30}"#,
        dir.path(),
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_traces(read(dir.path(), "compare.csv").as_bytes()).unwrap();
    for r in &rows {
        assert_eq!(r.err, Some(0.5f64.powi(r.n as i32)));
    }
}

#[test]
fn stability_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("stability", r#"{"problem": "cuberoot"}"#, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("constant:") && l.contains("verdict_forward false")));
    let (header, rows) = read_numeric_table(read(dir.path(), "stability.csv").as_bytes(), &["perturbation"]).unwrap();
    assert_eq!(header, ["perturbation", "n", "z", "eps", "err"]);
    assert_eq!(rows.len(), 400);

    let dir = tempfile::tempdir().unwrap();
    let o = run("stability", r#"{"perturbation_c": 0}"#, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.matches("verdict_forward true").count(), 2, "{out}");
    let (_, rows) = read_numeric_table(read(dir.path(), "stability.csv").as_bytes(), &["perturbation"]).unwrap();
    assert!(rows.iter().all(|r| r[3] == Some(0.0)));
}

#[test]
fn dde_negfeedback_and_c5() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("dde", r#"{"problem": "negfeedback", "h": 0.01}"#, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("2δ(b−t0)"));
    let (header, rows) = read_numeric_table(read(dir.path(), "solution.csv").as_bytes(), &[]).unwrap();
    assert_eq!(header, ["t", "x", "x_ref", "abs_err"]);
    let sup = rows.iter().map(|r| r[3].unwrap()).fold(0.0, f64::max);
    assert!(sup <= 1e-4, "{sup}");

    let dir = tempfile::tempdir().unwrap();
    let o = run("dde", r#"{"problem": "zero"}"#, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = read_numeric_table(read(dir.path(), "solution.csv").as_bytes(), &[]).unwrap();
    assert!(rows.iter().all(|r| r[1] == Some(1.0) && r[3] == Some(0.0)));

    let dir = tempfile::tempdir().unwrap();
    let o = run("dde", r#"{"problem": "negfeedback", "b": 0.6}"#, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("2δ(b−t0)"), "{}", stderr(&o));
    assert!(!dir.path().join("solution.csv").exists());
}

#[test]
fn dde_iteration_cap_is_nonconvergence() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("dde", r#"{"problem": "decay", "max_iter": 2, "tol": 1e-14}"#, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}

#[test]
fn bounds_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("bounds", r#"{"delta": 0.5, "n_max": 0}"#, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        read(dir.path(), "bounds.csv"),
        "n,new_scheme_bound,picard_mann_bound,bound_ratio\n\
         0,1.9140625000000000e-1,4.3750000000000000e-1,4.3750000000000000e-1\n"
    );

    let o = run("bounds", r#"{"problem": "linear-0.9", "n_max": 40}"#, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = read_numeric_table(read(dir.path(), "bounds.csv").as_bytes(), &[]).unwrap();
    assert_eq!(rows.len(), 41);
    for w in rows.windows(2) {
        assert!(w[1][3].unwrap() < w[0][3].unwrap());
    }

    let o = run("bounds", r#"{"delta": 0.3, "initial_err": 0}"#, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = read_numeric_table(read(dir.path(), "bounds.csv").as_bytes(), &[]).unwrap();
    assert!(rows.iter().all(|r| r[1] == Some(0.0) && r[2] == Some(0.0)));

    for bad in [r#"{"delta": 1.0}"#, r#"{"delta": 0}"#, r#"{}"#] {
        let dir = tempfile::tempdir().unwrap();
        let o = run("bounds", bad, dir.path(), &[]);
        assert_eq!(o.status.code(), Some(1), "{bad}");
        assert!(!dir.path().join("bounds.csv").exists());
    }
}

#[test]
fn certify_half_and_identity() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("certify", r#"{"problem": "linear-0.5"}"#, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = read_numeric_table(read(dir.path(), "certify.csv").as_bytes(), &[]).unwrap();
    let d = rows[0][1].unwrap();
    assert!((0.45..=0.5 + 1e-9).contains(&d), "{d}");

    let o = run("certify", r#"{"problem": "identity"}"#, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("certified false"));
}

#[test]
fn config_errors_exit_one_without_files() {
    for (cmd, cfg) in [
        ("compare", r#"{"problem": "cuberoot", "tolerance": 1e-9}"#),
        ("compare", r#"{"problem": "nosuch"}"#),
        ("compare", "not json"),
        ("stability", r#"{"horizon": 5}"#),
        ("dde", r#"{"h": 0.013}"#),
        ("certify", r#"{"command": "bounds"}"#),
        ("compare", r#"{"schedule": {"alpha": 2}}"#),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let o = run(cmd, cfg, dir.path(), &[]);
        assert_eq!(o.status.code(), Some(1), "{cmd} {cfg}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0, "{cmd} {cfg}");
    }
}

#[test]
fn config_from_file_and_output_dir_key() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results");
    let cfg_path = dir.path().join("run.json");
    std::fs::write(
        &cfg_path,
        format!(r#"{{"command": "bounds", "delta": 0.5, "n_max": 3, "output_dir": {:?}}}"#, out.to_str().unwrap()),
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fixpoint"))
        .args(["bounds", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(read(&out, "bounds.csv").lines().count(), 5);
}

#[test]
fn seed_flag_changes_certify_samples_deterministically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let cfg = r#"{"problem": "cuberoot", "samples": 200, "l_grid": [0, 0.5, 1]}"#;
    run("certify", cfg, a.path(), &["--seed", "7"]);
    run("certify", cfg, b.path(), &["--seed", "7"]);
    run("certify", cfg, c.path(), &["--seed", "8"]);
    let (fa, fb, fc) = (read(a.path(), "certify.csv"), read(b.path(), "certify.csv"), read(c.path(), "certify.csv"));
    assert_eq!(fa, fb);
    assert_ne!(fa, fc);
}

#[test]
fn every_command_is_byte_deterministic() {
    let cases = [
        ("compare", r#"{"problem": "cuberoot"}"#, "compare.csv"),
        ("stability", r#"{"problem": "cuberoot"}"#, "stability.csv"),
        ("dde", r#"{"problem": "negfeedback"}"#, "solution.csv"),
        ("bounds", r#"{"delta": 0.9}"#, "bounds.csv"),
        ("certify", r#"{"problem": "linear-0.5", "samples": 1000}"#, "certify.csv"),
    ];
    for (cmd, cfg, file) in cases {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run(cmd, cfg, a.path(), &["--seed", "3"]);
        run(cmd, cfg, b.path(), &["--seed", "3"]);
        assert_eq!(std::fs::read(a.path().join(file)).unwrap(), std::fs::read(b.path().join(file)).unwrap(), "{cmd}");
    }
}
