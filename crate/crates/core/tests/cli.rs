use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lazyrules"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn evaluate_happy_path_echoes_settings() {
    let o = run(&[
        "evaluate",
        "--data",
        &data("monks1.csv"),
        "--folds",
        "3",
        "--seed",
        "1",
        "--mode",
        "levels",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8(o.stdout).unwrap();
    for key in [
        "method=cv",
        "folds=3",
        "seed=1",
        "mode=levels",
        "lambda=0.75",
        "cmin=0.08",
        "kappa=0.98",
        "correctness=",
        "[confusion]",
    ] {
        assert!(out.contains(key), "missing {key} in\n{out}");
    }
}

#[test]
fn thread_count_does_not_change_the_report() {
    let args = |t: &'static str| {
        run(&[
            "--threads",
            t,
            "evaluate",
            "--data",
            &data("vote.csv"),
            "--mode",
            "exact",
        ])
        .stdout
    };
    assert_eq!(args("1"), args("4"));
}

#[test]
fn rules_and_predict_for_one_row() {
    let o = run(&["rules", "--data", &data("monks1.csv"), "--row", "0"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("IF "));
    let o = run(&["predict", "--data", &data("monks1.csv"), "--row", "0", "--show-rules"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn missing_schema_is_a_data_error_naming_the_path() {
    let o = run(&[
        "evaluate",
        "--data",
        &data("monks1.csv"),
        "--schema",
        "/nonexistent/m.schema",
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/m.schema"));
}

#[test]
fn row_out_of_range_is_a_data_error() {
    let o = run(&["predict", "--data", &data("monks1.csv"), "--row", "100000"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(
        code(&run(&["evaluate", "--data", &data("monks1.csv"), "--lambda", "1.5"])),
        1
    );
    assert_eq!(
        code(&run(&["evaluate", "--data", &data("monks1.csv"), "--mode", "fuzzy"])),
        1
    );
    assert_eq!(
        code(&run(&["evaluate", "--data", &data("monks1.csv"), "--folds", "1"])),
        1
    );
}

#[test]
fn loocv_cap_is_enforced() {
    let o = run(&["evaluate", "--data", &data("pima.csv"), "--loocv", "--loocv-cap", "100"]);
    assert_ne!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("100"));
}

#[test]
fn config_file_supplies_defaults() {
    let o = run(&[
        "evaluate",
        "--data",
        &data("monks1.csv"),
        "--config",
        &data("configs/large.toml"),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("cmin=0.17"));
}

#[test]
fn selftest_reports_counts() {
    let o = run(&["selftest", "--trials", "40", "--seed", "9"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("40"));
}
