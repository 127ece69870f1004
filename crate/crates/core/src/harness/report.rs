use serde::{Deserialize, Serialize};

use super::{
    relative_calls_to_solution, relative_time_to_solution, universal_recommendation, BruteForce,
};
use crate::design_space::{ArchId, Architecture, RuleSet};
use crate::optimize::{finite_or_null, RunOutcome, TARGET_TOLERANCE};

/// Aggregate of the repeated runs of one preset on one circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PresetSummary {
    pub circuit: String,
    pub preset: String,
    pub runs: usize,
    pub reached: usize,
    /// At least one run ended without the brute-force maximum.
    pub target_not_reached: bool,
    pub mean_relative_time: f64,
    pub worst_relative_time: f64,
    pub mean_relative_calls: f64,
    pub worst_relative_calls: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestRow {
    pub circuit: String,
    pub id: ArchId,
    pub arch: Architecture,
    #[serde(with = "finite_or_null")]
    pub log_esp: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub summaries: Vec<PresetSummary>,
    pub best_rows: Vec<BestRow>,
    pub universal: Option<Architecture>,
}

/// Time and calls a run needed to reach `oracle`, or its totals when it
/// never did.
pub fn run_cost(run: &RunOutcome, oracle: f64) -> (bool, f64, u64) {
    let hit = run
        .record
        .trajectory
        .iter()
        .find(|it| it.best_log_esp >= oracle - TARGET_TOLERANCE);
    match hit {
        Some(it) => (true, run.timing.time_to_best, it.calls),
        None => (false, run.timing.wall_time, run.record.unique_calls),
    }
}

/// Summarizes `runs` against the brute-force tables. Summaries follow the
/// order in which (circuit, preset) pairs first appear in `runs`.
pub fn compare(runs: &[RunOutcome], brutes: &[BruteForce], rules: &RuleSet) -> ComparisonReport {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in runs {
        let key = (r.record.circuit.clone(), r.record.optimizer.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut summaries = Vec::new();
    for (circuit, preset) in keys {
        let Some(brute) = brutes.iter().find(|b| b.table.circuit == circuit) else {
            continue;
        };
        let group: Vec<&RunOutcome> = runs
            .iter()
            .filter(|r| r.record.circuit == circuit && r.record.optimizer == preset)
            .collect();
        let mut times = Vec::new();
        let mut calls = Vec::new();
        let mut reached = 0;
        for r in &group {
            let (hit, t, c) = run_cost(r, brute.table.best_log_esp);
            reached += hit as usize;
            times.push(relative_time_to_solution(t, brute.wall_time));
            calls.push(relative_calls_to_solution(c, brute.table.valid_count));
        }
        summaries.push(PresetSummary {
            circuit,
            preset,
            runs: group.len(),
            reached,
            target_not_reached: reached < group.len(),
            mean_relative_time: mean(&times),
            worst_relative_time: times.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean_relative_calls: mean(&calls),
            worst_relative_calls: calls.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    let best_rows: Vec<BestRow> = brutes
        .iter()
        .filter_map(|b| {
            Some(BestRow {
                circuit: b.table.circuit.clone(),
                id: b.table.best_id?,
                arch: b.table.best()?,
                log_esp: b.table.best_log_esp,
            })
        })
        .collect();
    let archs: Vec<Architecture> = best_rows.iter().map(|r| r.arch).collect();
    ComparisonReport {
        summaries,
        universal: universal_recommendation(&archs, rules),
        best_rows,
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
