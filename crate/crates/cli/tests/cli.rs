use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

const SMALL: [&str; 6] = [
    "xyD=-1,100",
    "zD=-1,100",
    "tqgD=100",
    "sD=100",
    "degree=4,8",
    "xy_z_tqg=0",
];

fn spindse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spindse"))
        .args(args)
        .output()
        .unwrap()
}

fn small_args<'a>(out: &'a str, rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["--out", out];
    for r in SMALL {
        v.push("--restrict");
        v.push(r);
    }
    v.extend_from_slice(rest);
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn enumerate_prints_the_valid_count() {
    let o = spindse(&["enumerate"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "338148");
}

#[test]
fn restricted_enumeration() {
    let o = spindse(&small_args("unused", &["enumerate"]));
    assert_eq!(stdout(&o).trim(), "478");
}

#[test]
fn unknown_subcommand_fails_with_usage() {
    let o = spindse(&["frobnicate"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("Usage"));
    let o = spindse(&["enumerate", "--no-such-flag"]);
    assert!(!o.status.success());
}

#[test]
fn missing_files_are_named() {
    let o = spindse(&["evaluate", "/nonexistent/circuit.qasm"]);
    assert!(!o.status.success());
    assert!(
        stderr(&o).contains("/nonexistent/circuit.qasm"),
        "{}",
        stderr(&o)
    );
    let o = spindse(&["--rules", "/nonexistent/rules.txt", "enumerate"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("/nonexistent/rules.txt"));
}

#[test]
fn evaluate_and_compile() {
    let qft = corpus("qft_4.qasm");
    let o = spindse(&[
        "evaluate",
        qft.to_str().unwrap(),
        "--arch",
        "degree=8,router=Snake",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let b: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(b["log_esp"].as_f64().unwrap() < 0.0);
    let o = spindse(&[
        "compile",
        qft.to_str().unwrap(),
        "--arch",
        "single_qubit_impl=Global,xyD=25",
    ]);
    assert!(!o.status.success());
    assert!(
        stderr(&o).contains("global-forces-xyD-NA"),
        "{}",
        stderr(&o)
    );
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn optimize_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let qft = corpus("qft_4.qasm");
    let mut records = Vec::new();
    for attempt in ["a", "b"] {
        let out = dir.path().join(attempt);
        let out_s = out.to_str().unwrap().to_string();
        let args = small_args(
            &out_s,
            &[
                "--seed",
                "3",
                "--tc-max-iterations",
                "15",
                "optimize",
                qft.to_str().unwrap(),
                "--preset",
                "GA[50,0.2]",
                "--preset",
                "SA[20,3]",
                "--repetitions",
                "2",
            ],
        );
        let o = spindse(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        let mut files = Vec::new();
        for slug in ["GA_50_0.2", "SA_20_3"] {
            for seed in [3, 4] {
                files.push(
                    fs::read(out.join(format!("runs/qft_4/{slug}/seed-{seed}.json"))).unwrap(),
                );
            }
        }
        records.push(files);
    }
    assert_eq!(records[0], records[1]);
}

#[test]
fn compare_summary_matches_run_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap().to_string();
    let qft = corpus("qft_4.qasm");
    let o = spindse(&small_args(&out, &["brute-force", qft.to_str().unwrap()]));
    assert!(o.status.success(), "{}", stderr(&o));
    let o = spindse(&small_args(
        &out,
        &[
            "--tc-target-logesp",
            "oracle",
            "--tc-max-iterations",
            "200",
            "optimize",
            qft.to_str().unwrap(),
            "--preset",
            "RS",
            "--preset",
            "GA[50,0.15]",
            "--repetitions",
            "3",
        ],
    ));
    assert!(o.status.success(), "{}", stderr(&o));
    let o = spindse(&small_args(&out, &["compare"]));
    assert!(o.status.success(), "{}", stderr(&o));

    let brute = read_json(&dir.path().join("brute/qft_4.json"));
    let oracle = brute["best_log_esp"].as_f64().unwrap();
    let valid = brute["valid_count"].as_f64().unwrap();
    let mut reader = csv::Reader::from_path(dir.path().join("report/summary.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let preset = &row[col("preset")];
        let slug: String = preset.replace(['[', ','], "_").replace(']', "");
        let mut calls = Vec::new();
        for seed in 0..3 {
            let run = read_json(
                &dir.path()
                    .join(format!("runs/qft_4/{slug}/seed-{seed}.json")),
            );
            let hit = run["trajectory"].as_array().unwrap().iter().find(|it| {
                it["best_log_esp"]
                    .as_f64()
                    .is_some_and(|b| b >= oracle - 1e-12)
            });
            let c = match hit {
                Some(it) => it["calls"].as_f64().unwrap(),
                None => run["unique_calls"].as_f64().unwrap(),
            };
            calls.push(100.0 * c / valid);
        }
        let mean: f64 = calls.iter().sum::<f64>() / 3.0;
        let worst = calls.iter().cloned().fold(f64::MIN, f64::max);
        let got_mean: f64 = row[col("mean_relative_calls")].parse().unwrap();
        let got_worst: f64 = row[col("worst_relative_calls")].parse().unwrap();
        assert!(
            (got_mean - mean).abs() < 1e-9,
            "{preset}: {got_mean} vs {mean}"
        );
        assert!(
            (got_worst - worst).abs() < 1e-9,
            "{preset}: {got_worst} vs {worst}"
        );
    }
    assert!(dir.path().join("report/best_so_far.tsv").exists());
    let best = fs::read_to_string(dir.path().join("report/best.csv")).unwrap();
    assert!(best.lines().any(|l| l.starts_with("universal,")));
}
