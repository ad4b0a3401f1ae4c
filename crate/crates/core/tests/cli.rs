use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracsinc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn ml_eval_prints_value() {
    let o = run(&["ml-eval", "--gamma", "0.5", "--re", "-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("0.427583576156"), "{}", stdout(&o));
    let o = run(&["ml-eval", "--gamma", "1", "--re", "1"]);
    assert!(stdout(&o).starts_with("2.718281828459"));
}

#[test]
fn config_errors_exit_two() {
    for args in [
        &["convergence-space", "--beta", "1.5"][..],
        &["convergence-space", "--problem", "heat"],
        &["convergence-space", "--d", "1.0"],
        &["convergence-space", "--contour-sign", "sideways"],
        &["sinc-decay", "--N", "0"],
        &["ml-eval", "--gamma", "0"],
        &["solve", "--config", "/nonexistent/fracsinc.cfg"],
    ] {
        let o = run(args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn resource_failure_exits_three() {
    let o = run(&["solve", "--problem", "hom-2d", "--levels", "14"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn convergence_csv_layout_and_determinism() {
    let args = [
        "convergence-space",
        "--problem",
        "hom-1d",
        "--levels",
        "2..5",
        "--beta",
        "0.75",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines().skip_while(|l| l.starts_with('#'));
    assert_eq!(
        lines.next(),
        Some("abscissa,error_l2,error_h1,oroc_l2,oroc_h1")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    let first: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(first.len(), 5);
    assert_eq!(first[0], "2.50000000000000e-1");
    assert!(first[3].is_empty() && first[4].is_empty());
    let last: Vec<&str> = rows[3].split(',').collect();
    let mantissa = last[1].split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 15);
    assert!(text.contains("beta=0.75"));
    assert!(text.contains("levels=2,3,4,5"));
}

#[test]
fn flags_override_config_file() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        cfg,
        "# experiment\nproblem = hom-1d\nbeta=0.3\nlevels=2..3\nt=0.25"
    )
    .unwrap();
    let path = cfg.path().to_str().unwrap();
    let o = run(&["convergence-space", "--config", path, "--beta", "0.6"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert!(text.contains("beta=0.6") && !text.contains("beta=0.3"));
    assert!(text.contains("t=0.25"));

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "unknown_key=1").unwrap();
    let o = run(&[
        "convergence-space",
        "--config",
        bad.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.csv");
    let o = run(&[
        "solve",
        "--problem",
        "hom-2d",
        "--levels",
        "2",
        "--N",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().any(|l| l == "dof,x,y,re,im"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 9);
}
