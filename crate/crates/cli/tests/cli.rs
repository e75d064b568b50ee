use std::process::{Command, Output};

use markov_cli::records::{
    from_csv, CertificateRecord, CompareRecord, CompareReport, ComputeRecord, ListRecord, PairRecord, SolveRecord,
    SolveReport,
};

fn mkseries(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mkseries")).env_remove("MKSERIES_FORMAT").args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("UTF-8 output")
}

fn json<T: serde::de::DeserializeOwned>(args: &[&str]) -> (T, i32) {
    let out = mkseries(&[&["--format", "json"], args].concat());
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}: {}", stdout(&out)));
    (v, code(&out))
}

fn csv<T: serde::de::DeserializeOwned>(args: &[&str]) -> (Vec<T>, i32) {
    let out = mkseries(&[&["--format", "csv"], args].concat());
    (from_csv(&stdout(&out)).expect("CSV parses"), code(&out))
}

#[test]
fn compute_reports_certified_digits() {
    let (r, status): (ComputeRecord, _) = json(&["compute", "apery", "--digits", "33"]);
    assert_eq!(status, 0);
    assert_eq!(r.schema, "1");
    assert_eq!(r.value, "1.202056903159594285399738161511450");
    assert!(r.digits_proven >= 33);
    assert_eq!(r.rounding, "round-half-even");
    assert_eq!(r.status, "ok");
}

#[test]
fn explicit_term_count_with_truncation() {
    let (r, status): (ComputeRecord, _) =
        json(&["compute", "ratio27-zeta3", "--terms", "13", "--digits", "20", "--rounding", "truncate"]);
    assert_eq!(status, 0);
    assert_eq!(r.terms_used, 13);
    assert_eq!(r.value, "1.20205690315959428539");
}

#[test]
fn shortfall_exits_two() {
    let out = mkseries(&["compute", "kummer", "--digits", "30"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not certified"));
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["compute", "nosuch"][..],
        &["compute", "apery", "--digits", "0"],
        &["compute", "markov-hurwitz", "--a", "0.5"],
        &["compute", "markov-hurwitz", "--a", "1e3"],
        &["verify-pair", "3phi2", "--q", "2"],
        &["verify-pair", "3phi2", "--grid", "0x4"],
        &["solve", "nosuch-family"],
        &["frobnicate"],
    ] {
        assert_eq!(code(&mkseries(args)), 64, "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&mkseries(&["--help"])), 0);
}

#[test]
fn format_from_environment() {
    let out =
        Command::new(env!("CARGO_BIN_EXE_mkseries")).env("MKSERIES_FORMAT", "json").args(["list"]).output().unwrap();
    let rows: Vec<ListRecord> = serde_json::from_slice(&out.stdout).expect("JSON from env format");
    assert!(rows.iter().any(|r| r.id == "apery"));
}

#[test]
fn csv_and_json_carry_the_same_records() {
    let (report, s1): (CompareReport, _) = json(&["compare", "zeta3", "--digits", "15"]);
    let (rows, s2): (Vec<CompareRecord>, _) = csv(&["compare", "zeta3", "--digits", "15"]);
    assert_eq!((s1, s2), (0, 0));
    assert!(report.agree);
    assert_eq!(report.rows, rows);

    let (list_json, _): (Vec<ListRecord>, _) = json(&["list"]);
    let (list_csv, _): (Vec<ListRecord>, _) = csv(&["list"]);
    assert_eq!(list_json, list_csv);

    let (one, _): (ComputeRecord, _) = json(&["compute", "zeta2-27", "--digits", "12"]);
    let (many, _): (Vec<ComputeRecord>, _) = csv(&["compute", "zeta2-27", "--digits", "12"]);
    assert_eq!(vec![one], many);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["--format", "json", "--seed", "7", "verify-certificate", "3phi2", "--grid", "6x6", "--random", "3"];
    let a = mkseries(&args);
    let b = mkseries(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let rec: CertificateRecord = serde_json::from_slice(&a.stdout).unwrap();
    assert!(rec.passed);
    assert_eq!(rec.seed, 7);
    assert_eq!(rec.points_checked, 4 * 36);
}

#[test]
fn output_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("mkseries-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("list.json");
    let out = mkseries(&["--format", "json", "--output", path.to_str().unwrap(), "list"]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let rows: Vec<ListRecord> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!rows.is_empty());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_pair_fixtures_pass() {
    for (fixture, grid) in [("3phi2", "10x10"), ("4f3", "8x8"), ("well-poised", "6x6")] {
        let (r, status): (PairRecord, _) = json(&["verify-pair", fixture, "--grid", grid]);
        assert_eq!(status, 0, "{fixture}");
        assert!(r.passed && r.failure_x.is_none(), "{fixture}");
        assert_eq!(r.green_lhs, r.green_rhs, "{fixture}");
    }
}

#[test]
fn fuzzed_pair_and_certificate_fail() {
    let (r, status): (PairRecord, _) = json(&["--seed", "3", "verify-pair", "3phi2", "--grid", "8x8", "--fuzz"]);
    assert_eq!(status, 1);
    assert!(r.fuzz && !r.passed);
    assert!(r.residual.is_some());

    let (c, status): (CertificateRecord, _) =
        json(&["--seed", "3", "verify-certificate", "3phi2", "--grid", "5x5", "--random", "2", "--fuzz"]);
    assert_eq!(status, 1);
    assert!(c.fuzz && !c.passed);
}

#[test]
fn solve_reproduces_closed_forms() {
    let (r, status): (SolveReport, _) = json(&["solve", "3phi2-u1", "--x-max", "6"]);
    assert_eq!(status, 0);
    assert_eq!(r.status, "closed");
    assert_eq!(r.pair_verified, Some(true));
    assert_eq!(r.closed_form_match, Some(true));
    assert_eq!(r.steps.len(), 7);

    let (rows, _): (Vec<SolveRecord>, _) = csv(&["solve", "3phi2-u1", "--x-max", "6"]);
    let a3 = rows.iter().find(|row| row.x == 3 && row.kind == "a" && row.index == 0).unwrap();
    assert_eq!(a3.value, r.steps[3].a[0]);
}

#[test]
fn solve_reports_an_ansatz_that_does_not_close() {
    let (r, status): (SolveReport, _) = json(&["solve", "3phi2-u1", "--form", "u3-on-u1-family"]);
    assert_eq!(status, 1);
    assert_eq!(r.status, "does-not-close");
    assert_eq!(r.failing_x, Some(0));
    assert!(r.steps.is_empty());
}
