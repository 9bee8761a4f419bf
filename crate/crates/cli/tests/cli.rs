use std::path::Path;
use std::process::{Command, Output};

fn isosho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isosho")).args(args).env_remove("ISOSHO_PROFILE").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn vacuum_row() {
    let o = isosho(&["sweep", "--lambda-min", "0", "--lambda-max", "0", "--lambda-count", "1", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().all(|l| !l.starts_with("# generated")));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    let num = |i: usize| r[i].parse::<f64>().unwrap();
    assert_eq!(r[1], "ground");
    assert!((num(2) - 0.5).abs() < 1e-9 && (num(3) - 0.5).abs() < 1e-9);
    assert!(num(5).abs() < 1e-9);
    assert_eq!(r[6], "NA");
    assert!(num(7) < 1e-5);
    assert!((num(8) - 1.0).abs() < 1e-9);
    assert!((num(10) - 2.0 / 3.0).abs() < 1e-9);
    assert!(r[12].starts_with("fano:undefined"));
}

#[test]
fn reruns_are_byte_identical_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let o = isosho(&[
            "sweep",
            "--lambda-min",
            "1",
            "--lambda-max",
            "100",
            "--lambda-count",
            "4",
            "--temps",
            "ground,0.33",
            "--measures",
            "moments,nong,fano,qcs",
            "--threads",
            threads,
            "--no-timestamp",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv", "1");
    assert_eq!(a, run("b.csv", "1"));
    assert_eq!(a, run("c.csv", "2"));
}

#[test]
fn timestamp_header_unless_disabled() {
    let o =
        isosho(&["sweep", "--lambda-min", "1", "--lambda-max", "1", "--lambda-count", "1", "--measures", "moments"]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("# generated: ")));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# test\nlambda-min = 1\nlambda-max = 10\nlambda-count = 5\nmeasures = moments\nno-timestamp = true\n",
    )
    .unwrap();
    let o = isosho(&["sweep", "--config", cfg.to_str().unwrap(), "--lambda-count", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][0], "10.0");
    assert_eq!(rows[0][5], "NA");
}

#[test]
fn jsonl_uses_null_for_missing_values() {
    let o = isosho(&[
        "sweep",
        "--lambda-min",
        "2",
        "--lambda-max",
        "2",
        "--lambda-count",
        "1",
        "--measures",
        "nong",
        "--format",
        "jsonl",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains("\"var_x\":null"));
    assert!(text.contains("\"delta_nong\":0."));
}

#[test]
fn usage_errors_exit_with_one() {
    let unwritable = Path::new("/nonexistent-dir/out.csv").to_str().unwrap().to_string();
    for args in [
        vec!["sweep", "--bogus"],
        vec!["sweep", "--measures", "entropy"],
        vec!["sweep", "--lambda-min", "-0.8"],
        vec!["sweep", "--lambda-count", "0"],
        vec!["sweep", "--threads", "0"],
        vec!["sweep", "--config", "/nonexistent.cfg"],
        vec!["figure", "Fig7"],
        vec!["sweep", "--lambda-count", "1", "--lambda-min", "1", "--measures", "moments", "--out", &unwritable],
        vec![],
    ] {
        let o = isosho(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn figure_csv_names_the_figure() {
    let o = isosho(&[
        "figure",
        "TNONG",
        "--lambda-min",
        "1",
        "--lambda-max",
        "10",
        "--lambda-count",
        "2",
        "--no-timestamp",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# figure: TNONG\n"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().any(|r| r[1] == "ground") && rows.iter().any(|r| r[1] == "T=0.5"));
}

#[test]
fn verify_report_is_deterministic_and_matches_exit_code() {
    let a = isosho(&["verify"]);
    let b = isosho(&["verify"]);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS [") || l.starts_with("FAIL [")).count(), 10);
    let all_pass = !text.contains("FAIL [");
    assert_eq!(a.status.code(), Some(if all_pass { 0 } else { 3 }));
}
