use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cofix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cofix"))
        .args(args)
        .env_remove("COFIX_FIXTURE_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn fixtures() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures"))
}

#[test]
fn verify_ex3_3_holds() {
    let out = cofix(&["verify", "ex3_3", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v = json(&out);
    assert_eq!(v["holds"], true);
    assert!(v["condition"]["min_margin"].is_string());
}

#[test]
fn verify_ex4_2_two_map_condition_fails_at_1_and_1_3() {
    let out = cofix(&["verify", "ex4_2", "--condition", "two_map_max", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    let w = &v["condition"]["violation_witness"];
    assert_eq!((w["x"].as_str(), w["y"].as_str()), (Some("1"), Some("1/3")));
    assert!(stdout(&cofix(&["verify", "ex4_2", "--condition", "two_map_max"])).contains("witness (1, 1/3)"));
}

#[test]
fn verify_builds_conditions_from_flags() {
    let out = cofix(&[
        "verify",
        "ex3_8",
        "--condition",
        "jungck",
        "--coeff",
        "1/2",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let out = cofix(&[
        "verify",
        "ex3_8",
        "--condition",
        "jungck",
        "--coeff",
        "1/3",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn malformed_fixture_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ \"name\": \"broken\", ").unwrap();
    let out = cofix(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn unknown_fixture_exits_2() {
    assert_eq!(code(&cofix(&["verify", "ex9_9"])), 2);
}

#[test]
fn decimal_scalars_are_rejected() {
    assert_eq!(code(&cofix(&["iterate", "ex3_3", "--x0", "0.5"])), 2);
    assert_eq!(code(&cofix(&["iterate", "ex3_3", "--x0", "1/0"])), 2);
}

#[test]
fn iterate_ex3_3_reaches_2_3() {
    let out = cofix(&["iterate", "ex3_3", "--x0", "1/2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["status"]["kind"], "unique_point");
    assert_eq!(v["z"], "2/3");
}

#[test]
fn iterate_ex3_8_escapes_to_0() {
    let out = cofix(&["iterate", "ex3_8", "--x0", "1", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["status"]["kind"], "no_limit_in_space");
    assert_eq!(v["status"]["escaping_to"], "0");
    assert_eq!(v["z"], Value::Null);
}

#[test]
fn iterate_ex4_2_power_2_reaches_1() {
    let out = cofix(&["iterate", "ex4_2", "--power", "2", "--x0", "1", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v = json(&out);
    assert_eq!(v["kind"], "power");
    assert_eq!(v["status"]["kind"], "unique_point");
    assert_eq!(v["z"], "1");
}

#[test]
fn iterate_family_checks_every_index() {
    let out = cofix(&["iterate", "ex4_7", "--indices", "1,2,3", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(json(&out)["kind"], "family");
}

#[test]
fn trace_csv_has_the_plot_columns() {
    let out = cofix(&["iterate", "ex3_3", "--x0", "1/2", "--format", "csv"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,x_n,y_n,alpha_n"));
    let last = lines.last().unwrap();
    assert_eq!(last.split(',').nth(2), Some("2/3"));
}

#[test]
fn synthesize_ex3_3_phi_is_all_green() {
    let out = cofix(&["synthesize", "ex3_3.phi", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["all_green"], true);
}

#[test]
fn synthesize_identity_exits_1() {
    let out = cofix(&["synthesize", "linear:1"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("reaches 1"));
}

#[test]
fn synthesize_half_writes_a_dominating_psi() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.json");
    let out = cofix(&[
        "synthesize",
        "linear:1/2",
        "--out",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["certificate"]["dominates"]["holds"], true);
    let psi: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(psi, v["psi"]);
}

#[test]
fn synthesize_reads_control_files() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let out = cofix(&["synthesize", "linear:2/3", "--out", first.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let out = cofix(&["synthesize", first.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn compat_ex3_4_is_not_compatible() {
    let out = cofix(&["compat", "ex3_4", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["compatibility"]["outcome"], "falsified");
    assert_eq!(v["weak_compatibility"]["holds"], true);
}

#[test]
fn csv_is_refused_where_it_means_nothing() {
    assert_eq!(code(&cofix(&["verify", "ex3_3", "--format", "csv"])), 2);
    assert_eq!(code(&cofix(&["compat", "ex3_4", "--format", "csv"])), 2);
}

#[test]
fn corpus_passes_as_a_whole() {
    let out = cofix(&["corpus", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["scenarios"].as_array().unwrap().len(), 6);
}

#[test]
fn corpus_only_runs_one_scenario() {
    let out = cofix(&["corpus", "--only", "ex4_4"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("ex4_4: PASS"));
    assert!(text.ends_with("corpus: PASS (1/1 scenarios)\n"));
    assert_eq!(code(&cofix(&["corpus", "--only", "nope"])), 2);
}

#[test]
fn corpus_csv_has_one_row_per_expectation() {
    let out = cofix(&["corpus", "--only", "ex3_8", "--format", "csv"]);
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<_> = r.records().map(Result::unwrap).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|row| &row[0] == "ex3_8" && &row[3] == "true"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        &["verify", "ex3_3", "--format", "json"][..],
        &["iterate", "ex3_3", "--x0", "1/2", "--format", "json"],
        &["corpus", "--only", "ex3_4,ex4_7"],
    ] {
        assert_eq!(cofix(args).stdout, cofix(args).stdout, "{args:?}");
    }
}

#[test]
fn fixture_dir_override_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixtures().join("ex3_3.json"), dir.path().join("ex3_3.json")).unwrap();
    let mut changed: Value =
        serde_json::from_str(&std::fs::read_to_string(fixtures().join("ex3_8.json")).unwrap()).unwrap();
    changed["summary"] = Value::String("local copy".into());
    std::fs::write(dir.path().join("ex3_8.json"), changed.to_string()).unwrap();

    let out = Command::new(env!("CARGO_BIN_EXE_cofix"))
        .args(["corpus", "--format", "json"])
        .env("COFIX_FIXTURE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let names: Vec<_> = v["scenarios"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].clone())
        .collect();
    assert_eq!(names, ["ex3_3", "ex3_8"]);
    assert_eq!(v["scenarios"][1]["summary"], "local copy");

    let missing = Command::new(env!("CARGO_BIN_EXE_cofix"))
        .args(["verify", "ex4_2"])
        .env("COFIX_FIXTURE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&missing), 2);
}
