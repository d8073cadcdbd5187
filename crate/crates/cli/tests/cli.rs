use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rfmeasure::logmodel::write_text;
use rfmeasure_testkit::{random_log, rng, RUNNING_LOG};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rfmeasure"));
    c.env_remove("RFMEASURE_THREADS");
    c
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "status {:?}: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

struct Fixture {
    dir: tempfile::TempDir,
    log: PathBuf,
    spec: PathBuf,
}

fn running() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let log = write(dir.path(), "running.txt", RUNNING_LOG);
    let spec = write(
        dir.path(),
        "S.spec",
        "# running example\nc |> O a\nd |> F e\n",
    );
    Fixture { dir, log, spec }
}

/// Parses the CSV report into (subject, scope, measure) -> raw.
fn csv_value(csv: &str, subject: &str, scope: &str, measure: &str) -> f64 {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    for rec in r.records() {
        let rec = rec.unwrap();
        if &rec[0] == subject && &rec[2] == scope && &rec[3] == measure {
            return rec[4].parse().unwrap();
        }
    }
    panic!("no row {subject} {scope} {measure}");
}

#[test]
fn measure_reproduces_the_specification_row() {
    let f = running();
    let out = run(bin()
        .args(["measure", "--format", "csv", "--log"])
        .arg(&f.log)
        .arg("--spec")
        .arg(&f.spec));
    let csv = stdout(&out);
    for (m, want) in [
        ("support", 0.30),
        ("confidence", 0.81),
        ("recall", 0.46),
        ("specificity", 0.44),
        ("lift", 1.25),
    ] {
        let got = csv_value(&csv, "S", "log", m);
        assert!((got - want).abs() <= 0.005, "{m}: {got}");
    }
    // six decimals, never a negative zero
    assert!(csv.lines().skip(1).all(|l| !l.contains("-0.000000")));
    assert!(csv.contains(",0.301235,"));
}

#[test]
fn single_measure_json_report() {
    let f = running();
    let out_path = f.dir.path().join("r.json");
    run(bin()
        .args([
            "measure",
            "--measures",
            "confidence",
            "--scope",
            "trace",
            "--log",
        ])
        .arg(&f.log)
        .arg("--spec")
        .arg(&f.spec)
        .arg("--out")
        .arg(&out_path));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["tool"], "rfmeasure");
    assert_eq!(v["mode"], "table");
    assert_eq!(v["measures"].as_array().unwrap().len(), 1);
    let rows = v["rows"].as_array().unwrap();
    // 5 traces x (2 rules + specification), then the log rows
    assert_eq!(rows.len(), 18);
    assert!(rows
        .iter()
        .all(|r| r["values"].as_array().unwrap().len() == 1));
    let t5_spec = rows
        .iter()
        .find(|r| r["scope"] == "t5" && r["kind"] == "specification")
        .unwrap();
    assert_eq!(t5_spec["values"][0]["raw"], "NaN");
}

#[test]
fn formal_mode_flag() {
    let f = running();
    let out = run(bin()
        .args([
            "measure",
            "--mode",
            "formal",
            "--scope",
            "trace",
            "--format",
            "csv",
            "--measures",
            "confidence,recall",
            "--log",
        ])
        .arg(&f.log)
        .arg("--spec")
        .arg(&f.spec));
    let csv = stdout(&out);
    assert!((csv_value(&csv, "S", "t2", "confidence") - 0.75).abs() < 1e-12);
}

#[test]
fn missing_or_bad_inputs_exit_2() {
    let f = running();
    let missing = bin()
        .args(["measure", "--log"])
        .arg(&f.log)
        .args(["--spec", "/nonexistent/spec.txt"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("error:"));

    let bad = write(f.dir.path(), "bad.spec", "c |> (O a\n");
    let out = bin()
        .args(["measure", "--log"])
        .arg(&f.log)
        .arg("--spec")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let gz = write(f.dir.path(), "log.xes.gz", "");
    let out = bin()
        .args(["measure", "--log"])
        .arg(&gz)
        .arg("--spec")
        .arg(&f.spec)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["windows", "--size", "100", "--slide", "1", "--log"])
        .arg(&f.log)
        .arg("--spec")
        .arg(&f.spec)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["measure", "--measures", "nonsense", "--log"])
        .arg(&f.log)
        .arg("--spec")
        .arg(&f.spec)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_log_with_custom_columns() {
    let f = running();
    let log = write(
        f.dir.path(),
        "events.csv",
        "Case,Task\n1,c\n1,a\n1,c\n2,a\n2,c\n",
    );
    let out = run(bin()
        .args([
            "measure",
            "--format",
            "csv",
            "--measures",
            "confidence",
            "--case-column",
            "Case",
            "--activity-column",
            "Task",
            "--log",
        ])
        .arg(&log)
        .arg("--spec")
        .arg(&f.spec));
    let csv = stdout(&out);
    // (1/3 + 1/2) / (2/3 + 1/2): one of two c's in case 1, the only c in case 2
    let first_rule = csv.lines().nth(1).unwrap();
    assert!(first_rule.ends_with(",0.714286,0.714286"), "{first_rule}");
}

/// `n` cases of `a,b` in timestamp order.
fn constant_log(n: usize) -> String {
    let mut s = String::from("case_id,activity,timestamp\n");
    for k in 0..n {
        let day = k / 24;
        let hour = k % 24;
        for (j, a) in ["a", "b"].iter().enumerate() {
            s.push_str(&format!(
                "case{k:04},{a},2020-01-{:02}T{hour:02}:{j:02}:00Z\n",
                day % 28 + 1
            ));
        }
    }
    s
}

#[test]
fn windows_on_1050_cases() {
    let dir = tempfile::tempdir().unwrap();
    let log = write(dir.path(), "big.txt", &"a,b\n".repeat(1050));
    let spec = write(dir.path(), "S.spec", "Response(a,b)\n");
    let stats = dir.path().join("stats.csv");
    let out = run(bin()
        .args([
            "windows",
            "--size",
            "50",
            "--slide",
            "50",
            "--normalized",
            "--log",
        ])
        .arg(&log)
        .arg("--spec")
        .arg(&spec)
        .arg("--stats")
        .arg(&stats));
    let series = stdout(&out);
    let rows: Vec<&str> = series.lines().skip(1).collect();
    assert_eq!(rows.len(), 21 * 24);
    assert!(rows.iter().all(|r| {
        let v = r.rsplit(',').next().unwrap();
        v == "NaN" || (0.0..=1.0).contains(&v.parse::<f64>().unwrap())
    }));
    let table = std::fs::read_to_string(stats).unwrap();
    let mut r = csv::Reader::from_reader(table.as_bytes());
    for rec in r.records() {
        let rec = rec.unwrap();
        assert!(&rec[3] == "0.000000" || &rec[3] == "NaN", "{rec:?}");
    }
}

#[test]
fn windows_json_with_timestamps() {
    let dir = tempfile::tempdir().unwrap();
    let log = write(dir.path(), "events.csv", &constant_log(60));
    let spec = write(dir.path(), "S.spec", "Response(a,b)\n");
    let out = run(bin()
        .args([
            "windows",
            "--size",
            "20",
            "--slide",
            "20",
            "--measures",
            "confidence,lift",
            "--format",
            "json",
            "--log",
        ])
        .arg(&log)
        .arg("--spec")
        .arg(&spec));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["windows"].as_array().unwrap().len(), 3);
    assert_eq!(v["windows"][1]["first_case"], "case0020");
    assert!(v["windows"][0]["timestamp"]
        .as_str()
        .unwrap()
        .starts_with("2020-01-01T00:00:00"));
    assert_eq!(v["stats"][0]["cv"], 0.0);
}

#[test]
fn mine_finds_response_d_e() {
    let f = running();
    let spec_out = f.dir.path().join("mined.json");
    run(bin()
        .args([
            "mine",
            "--templates",
            "response",
            "--confidence",
            "0.8",
            "--log",
        ])
        .arg(&f.log)
        .arg("--out")
        .arg(&spec_out));
    let text = std::fs::read_to_string(&spec_out).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["rules"]
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["template"] == "Response" && r["args"] == serde_json::json!(["d", "e"])));
    // the mined file is accepted unchanged by `measure`
    let out = run(bin()
        .args(["measure", "--format", "csv", "--log"])
        .arg(&f.log)
        .arg("--spec")
        .arg(&spec_out));
    assert!(stdout(&out).contains("\"Response(d,e)\",rule,log,confidence,0.848101"));
}

#[test]
fn mine_empty_result_is_explicit() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(3);
    let log = write(
        dir.path(),
        "random.txt",
        &write_text(&random_log(&mut r, 60, 12, 3, &["a", "b", "c", "d"])),
    );
    let out = run(bin()
        .args([
            "mine",
            "--templates",
            "ChainResponse,Response",
            "--confidence",
            "1.0",
            "--log",
        ])
        .arg(&log));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rules"], serde_json::json!([]));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no rule reaches"));
}

#[test]
fn mine_sweep_table() {
    let f = running();
    let sweep = f.dir.path().join("sweep.csv");
    run(bin()
        .args([
            "mine",
            "--templates",
            "response,precedence",
            "--sweep",
            "0:1:0.05",
            "--log",
        ])
        .arg(&f.log)
        .arg("--sweep-out")
        .arg(&sweep));
    let text = std::fs::read_to_string(sweep).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "threshold,rule_count,spec_confidence,mean_rule_confidence"
    );
    assert_eq!(lines.len(), 22);
    assert!(lines[1].starts_with("0.000000,"));
    assert!(lines[21].starts_with("1.000000,"));

    let bad = bin()
        .args(["mine", "--confidence", "1.5", "--log"])
        .arg(&f.log)
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn templates_lists_the_catalog() {
    let out = run(bin().arg("templates"));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 15);
    assert!(text
        .lines()
        .any(|l| l.starts_with("Response ") && l.contains("a |> (F b)")));
}

#[test]
fn thread_env_variable_is_honored() {
    let f = running();
    let a = run(bin()
        .env("RFMEASURE_THREADS", "3")
        .args(["measure", "--log"])
        .arg(&f.log)
        .arg("--spec")
        .arg(&f.spec));
    let b = run(bin()
        .args(["--threads", "1", "measure", "--log"])
        .arg(&f.log)
        .arg("--spec")
        .arg(&f.spec));
    assert_eq!(a.stdout, b.stdout);
}
