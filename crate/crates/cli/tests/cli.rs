use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ekr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ekr")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = ekr(&all);
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn count_text_and_exit_code() {
    let o = ekr(&["count", "--n", "6", "--p", "1", "--s", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("family_size 240"), "{text}");
    assert!(text.contains("star_size 80"), "{text}");
}

#[test]
fn invalid_input_exits_2() {
    let o = ekr(&["count", "--n", "3", "--p", "2", "--s", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid signature"));
    assert_eq!(ekr(&["count", "--n", "3"]).status.code(), Some(2));
    let o = ekr(&["verify", "--n", "5", "--p", "1", "--s", "1", "--family", "star:l9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_envelope() {
    let v = json(&["count", "--n", "3", "--p", "1", "--s", "1"]);
    assert_eq!(v["schema"], "ekr-report/1");
    assert_eq!(v["command"], "count");
    assert_eq!(v["pass"], true);
    assert_eq!(v["results"][0]["family_size"], 12);
    assert_eq!(v["results"][0]["star_size"], 6);
}

#[test]
fn sweep_csv_and_json() {
    let o = ekr(&["--format", "csv", "ekr-sweep", "--n", "3..5", "--p", "1", "--s", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let records: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 3);
    let maxima: Vec<&str> = records.iter().map(|r| &r[col("max_size")]).collect();
    assert_eq!(maxima, ["6", "9", "12"]);
    let strong: Vec<&str> = records.iter().map(|r| &r[col("strongly_ekr")]).collect();
    assert_eq!(strong, ["false", "true", "true"]);

    let v = json(&["ekr-sweep", "--n", "4", "--p", "1", "--s", "2"]);
    let row = &v["results"][0];
    assert_eq!(row["max_size"], 24);
    assert_eq!(row["ekr"], true);
    assert!(row["witnesses"].as_array().is_some_and(|w| !w.is_empty()));
}

#[test]
fn empty_range_is_empty_report() {
    let v = json(&["ekr-sweep", "--n", "5..3", "--p", "1", "--s", "1"]);
    assert_eq!(v["results"].as_array().unwrap().len(), 0);
    assert_eq!(v["pass"], true);
}

#[test]
fn verify_star_passes() {
    let o = ekr(&["verify", "--n", "5", "--p", "1", "--s", "1", "--family", "star:l5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&[
        "verify", "--n", "5", "--p", "1", "--s", "1", "--family", "star:l5", "--lemmas", "1,4",
    ]);
    assert_eq!(v["pass"], true);
}

#[test]
fn verify_reports_unmet_hypotheses() {
    let o = ekr(&[
        "verify", "--n", "5", "--p", "1", "--s", "1", "--family", "avoid:l5", "--lemmas", "1",
    ]);
    assert!(stdout(&o).contains("not applicable"), "{}", stdout(&o));
    let o = ekr(&[
        "verify", "--n", "3", "--p", "1", "--s", "1", "--family", "avoid:l3", "--lemmas", "1",
    ]);
    assert!(stdout(&o).contains("not applicable: n < 2(p+s)"), "{}", stdout(&o));
}

#[test]
fn construct_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("star.txt");
    let file = file.to_str().unwrap();
    let o = ekr(&["-o", file, "construct", "--n", "5", "--p", "1", "--s", "1", "star:r2"]);
    assert_eq!(o.status.code(), Some(0));
    let members = std::fs::read_to_string(file)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .count();
    assert_eq!(members, 12);
    let o = ekr(&[
        "verify", "--n", "5", "--p", "1", "--s", "1", "--family", file, "--lemmas", "1,3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn doublecount_and_general() {
    let v = json(&["doublecount", "--n", "4", "--p", "1", "--s", "1"]);
    assert_eq!(v["pass"], true);
    let v = json(&["general", "--m", "3", "--n", "2", "--sig", "1,1"]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["results"][0]["max_intersecting"], 6);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ekr.toml");
    std::fs::write(&cfg, "format = \"json\"\nthreads = 1\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = ekr(&["--config", cfg, "count", "--n", "3", "--p", "1", "--s", "1"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "ekr-report/1");
    let o = ekr(&[
        "--config", cfg, "--format", "text", "count", "--n", "3", "--p", "1", "--s", "1",
    ]);
    assert!(stdout(&o).starts_with("family_size 12"));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "colour = \"blue\"\n").unwrap();
    let o = ekr(&[
        "--config",
        bad.to_str().unwrap(),
        "count",
        "--n",
        "3",
        "--p",
        "1",
        "--s",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

fn run_to(path: &Path) {
    let o = ekr(&[
        "--format",
        "json",
        "-o",
        path.to_str().unwrap(),
        "ekr-sweep",
        "--n",
        "3..5",
        "--p",
        "1",
        "--s",
        "1..2",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    run_to(&a);
    run_to(&b);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
