//! On-disk layout of results.
//!
//! ```text
//! <out>/brute/<circuit>.jsonl          one scored architecture per line
//! <out>/brute/<circuit>.json           table summary
//! <out>/brute/<circuit>.timing.json
//! <out>/runs/<circuit>/<preset>/seed-<n>.json
//! <out>/runs/<circuit>/<preset>/seed-<n>.timing.json
//! <out>/report/summary.csv, report.json, best.csv, best_so_far.tsv
//! ```

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use spindse::design_space::{ArchId, Architecture, Variable};
use spindse::harness::{BruteEntry, BruteForce, BruteTable, ComparisonReport};
use spindse::optimize::{finite_or_null, RunOutcome, RunRecord, RunTiming};

#[derive(Serialize, Deserialize)]
struct BruteSummary {
    circuit: String,
    valid_count: u64,
    best_id: Option<ArchId>,
    best: Option<Architecture>,
    #[serde(with = "finite_or_null")]
    best_log_esp: f64,
    failures: usize,
}

#[derive(Serialize, Deserialize)]
struct BruteTiming {
    wall_time: f64,
}

/// File-system friendly preset name: `GA[100,0.2]` becomes `GA_100_0.2`.
pub fn slug(preset: &str) -> String {
    preset
        .chars()
        .filter(|c| *c != ']')
        .map(|c| if c == '[' || c == ',' { '_' } else { c })
        .collect()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn brute_dir(out: &Path) -> PathBuf {
    out.join("brute")
}

pub fn write_brute(out: &Path, brute: &BruteForce) -> Result<PathBuf> {
    let dir = brute_dir(out);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let t = &brute.table;
    let lines = dir.join(format!("{}.jsonl", t.circuit));
    let mut w = BufWriter::new(
        fs::File::create(&lines).with_context(|| format!("writing {}", lines.display()))?,
    );
    for e in &t.entries {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    let summary = BruteSummary {
        circuit: t.circuit.clone(),
        valid_count: t.valid_count,
        best_id: t.best_id,
        best: t.best(),
        best_log_esp: t.best_log_esp,
        failures: t.failures,
    };
    let path = dir.join(format!("{}.json", t.circuit));
    write_json(&path, &summary)?;
    write_json(
        &dir.join(format!("{}.timing.json", t.circuit)),
        &BruteTiming {
            wall_time: brute.wall_time,
        },
    )?;
    Ok(path)
}

/// Reads a brute-force summary and timing. With `entries`, the per
/// architecture lines are loaded as well.
pub fn read_brute(summary: &Path, entries: bool) -> Result<BruteForce> {
    let s: BruteSummary = read_json(summary)?;
    let stem = summary.with_extension("");
    let timing: BruteTiming = read_json(&stem.with_extension("timing.json"))?;
    let mut rows = Vec::new();
    if entries {
        let path = stem.with_extension("jsonl");
        let f = fs::File::open(&path).with_context(|| format!("reading {}", path.display()))?;
        for line in BufReader::new(f).lines() {
            let row: BruteEntry = serde_json::from_str(&line?)
                .with_context(|| format!("parsing {}", path.display()))?;
            rows.push(row);
        }
    }
    Ok(BruteForce {
        table: BruteTable {
            circuit: s.circuit,
            valid_count: s.valid_count,
            best_id: s.best_id,
            best_log_esp: s.best_log_esp,
            failures: s.failures,
            entries: rows,
        },
        wall_time: timing.wall_time,
    })
}

pub fn read_all_brutes(out: &Path) -> Result<Vec<BruteForce>> {
    let dir = brute_dir(out);
    let mut paths: Vec<PathBuf> = match fs::read_dir(&dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json") && !is_timing(p))
            .collect(),
        Err(_) => Vec::new(),
    };
    paths.sort();
    paths.iter().map(|p| read_brute(p, false)).collect()
}

fn is_timing(p: &Path) -> bool {
    p.file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.ends_with(".timing.json"))
}

pub fn run_path(out: &Path, record: &RunRecord) -> PathBuf {
    out.join("runs")
        .join(&record.circuit)
        .join(slug(&record.optimizer))
        .join(format!("seed-{}.json", record.seed))
}

pub fn write_run(out: &Path, run: &RunOutcome) -> Result<PathBuf> {
    let path = run_path(out, &run.record);
    write_json(&path, &run.record)?;
    write_json(&path.with_extension("timing.json"), &run.timing)?;
    Ok(path)
}

/// Every run under `<out>/runs`, sorted by path.
pub fn read_all_runs(out: &Path) -> Result<Vec<RunOutcome>> {
    let root = out.join("runs");
    let mut paths = Vec::new();
    collect_runs(&root, &mut paths)?;
    paths.sort();
    paths
        .iter()
        .map(|p| {
            Ok(RunOutcome {
                record: read_json(p)?,
                timing: read_json::<RunTiming>(&p.with_extension("timing.json"))?,
            })
        })
        .collect()
}

fn collect_runs(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let Ok(rd) = fs::read_dir(dir) else {
        return Ok(());
    };
    for entry in rd {
        let p = entry?.path();
        if p.is_dir() {
            collect_runs(&p, out)?;
        } else if p.extension().is_some_and(|x| x == "json") && !is_timing(&p) {
            out.push(p);
        }
    }
    Ok(())
}

/// Writes the report as JSON, the per-preset CSV, the best-architecture CSV
/// and best-so-far curves.
pub fn write_report(
    out: &Path,
    report: &ComparisonReport,
    runs: &[RunOutcome],
) -> Result<Vec<PathBuf>> {
    let dir = out.join("report");
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let json = dir.join("report.json");
    write_json(&json, report)?;

    let summary = dir.join("summary.csv");
    let mut w = csv::Writer::from_path(&summary)
        .with_context(|| format!("writing {}", summary.display()))?;
    for s in &report.summaries {
        w.serialize(s)?;
    }
    w.flush()?;

    let best = dir.join("best.csv");
    write_best_csv(&best, report)?;

    let curves = dir.join("best_so_far.tsv");
    let mut f = BufWriter::new(
        fs::File::create(&curves).with_context(|| format!("writing {}", curves.display()))?,
    );
    writeln!(f, "circuit\tpreset\tseed\titeration\tcalls\tbest_log_esp")?;
    for r in runs {
        for it in &r.record.trajectory {
            writeln!(
                f,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.record.circuit,
                r.record.optimizer,
                r.record.seed,
                it.iteration,
                it.calls,
                it.best_log_esp
            )?;
        }
    }
    f.flush()?;
    Ok(vec![json, summary, best, curves])
}

/// One row per circuit with its best architecture, then the universal row.
pub fn write_best_csv(path: &Path, report: &ComparisonReport) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    let mut header = vec!["circuit".to_string()];
    header.extend(Variable::ALL.iter().map(|v| v.name().to_string()));
    header.push("log_esp".into());
    w.write_record(&header)?;
    let row = |name: &str, arch: &Architecture, log_esp: String| {
        let mut r = vec![name.to_string()];
        r.extend(Variable::ALL.iter().map(|v| v.format_value(arch.get(*v))));
        r.push(log_esp);
        r
    };
    for b in &report.best_rows {
        w.write_record(row(&b.circuit, &b.arch, b.log_esp.to_string()))?;
    }
    if let Some(u) = &report.universal {
        w.write_record(row("universal", u, String::new()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn ensure_nonempty<T>(items: &[T], what: &str, out: &Path) -> Result<()> {
    if items.is_empty() {
        bail!("no {what} found under {}", out.display());
    }
    Ok(())
}
