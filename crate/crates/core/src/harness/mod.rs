//! Brute-force oracles, relative metrics, reports and experiment runs.

mod experiment;
mod report;

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::compiler::compile;
use crate::design_space::{ArchId, Architecture, DesignSpace, RuleSet, Variable, NUM_VARIABLES};
use crate::esp::{estimate, EspBreakdown, NoiseConfig};
use crate::optimize::{finite_or_null, TableObjective};

pub use experiment::{
    load_circuit, load_noise, load_space, run_experiment, termination_for, ExperimentError,
    ExperimentManifest, ExperimentResults, TargetSpec,
};
pub use report::{compare, run_cost, BestRow, ComparisonReport, PresetSummary};

/// One architecture of a brute-force table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteEntry {
    pub id: ArchId,
    pub breakdown: Option<EspBreakdown>,
    pub error: Option<String>,
}

impl BruteEntry {
    pub fn log_esp(&self) -> f64 {
        self.breakdown
            .as_ref()
            .map_or(f64::NEG_INFINITY, |b| b.log_esp)
    }
}

/// Scores of every valid architecture for one circuit, ordered by id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteTable {
    pub circuit: String,
    pub valid_count: u64,
    /// First id (lowest) attaining the maximum, failures excluded.
    pub best_id: Option<ArchId>,
    #[serde(with = "finite_or_null")]
    pub best_log_esp: f64,
    pub failures: usize,
    pub entries: Vec<BruteEntry>,
}

impl BruteTable {
    pub fn best(&self) -> Option<Architecture> {
        self.best_id.and_then(Architecture::from_id)
    }

    /// Ids attaining the maximum within `tol`.
    pub fn argmax(&self, tol: f64) -> Vec<ArchId> {
        self.entries
            .iter()
            .filter(|e| e.breakdown.is_some() && e.log_esp() >= self.best_log_esp - tol)
            .map(|e| e.id)
            .collect()
    }

    pub fn objective(&self) -> TableObjective {
        let table: HashMap<ArchId, Result<EspBreakdown, String>> = self
            .entries
            .iter()
            .map(|e| {
                let v = match (&e.breakdown, &e.error) {
                    (Some(b), _) => Ok(b.clone()),
                    (None, Some(err)) => Err(err.clone()),
                    (None, None) => Err("no result".to_string()),
                };
                (e.id, v)
            })
            .collect();
        TableObjective::new(self.circuit.clone(), table)
    }

    fn from_entries(circuit: &str, entries: Vec<BruteEntry>) -> BruteTable {
        let mut best: Option<&BruteEntry> = None;
        for e in entries.iter().filter(|e| e.breakdown.is_some()) {
            if best.is_none_or(|b| e.log_esp() > b.log_esp()) {
                best = Some(e);
            }
        }
        BruteTable {
            circuit: circuit.to_string(),
            valid_count: entries.len() as u64,
            best_id: best.map(|b| b.id),
            best_log_esp: best.map_or(f64::NEG_INFINITY, |b| b.log_esp()),
            failures: entries.iter().filter(|e| e.breakdown.is_none()).count(),
            entries,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForce {
    pub table: BruteTable,
    /// Seconds, measured on a monotonic clock.
    pub wall_time: f64,
}

/// Compiles and scores every valid architecture of `space`. Architectures
/// are processed in parallel; the table is in id order regardless.
pub fn brute_force(circuit: &Circuit, space: &DesignSpace, noise: &NoiseConfig) -> BruteForce {
    let start = Instant::now();
    let entries: Vec<BruteEntry> = space
        .valid_ids()
        .par_iter()
        .map(|&id| {
            let arch = Architecture::from_id(id).expect("valid id");
            match compile(circuit, &arch, noise) {
                Ok(c) => BruteEntry {
                    id,
                    breakdown: Some(estimate(&c, noise)),
                    error: None,
                },
                Err(e) => BruteEntry {
                    id,
                    breakdown: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let table = BruteTable::from_entries(&circuit.name, entries);
    BruteForce {
        table,
        wall_time: start.elapsed().as_secs_f64(),
    }
}

/// Run time as a percentage of the brute-force time.
pub fn relative_time_to_solution(run_time: f64, brute_time: f64) -> f64 {
    100.0 * run_time / brute_time
}

/// Distinct evaluations as a percentage of the valid space.
pub fn relative_calls_to_solution(unique_calls: u64, valid_count: u64) -> f64 {
    100.0 * unique_calls as f64 / valid_count as f64
}

/// Merges per-circuit best architectures into one recommendation.
///
/// Numeric variables are averaged over the rows that do not hold `-1` and
/// snapped to the nearest domain value, ties going up. Other variables take
/// the most frequent value, ties going to the lowest code. The result is
/// repaired against `rules`.
pub fn universal_recommendation(rows: &[Architecture], rules: &RuleSet) -> Option<Architecture> {
    if rows.is_empty() {
        return None;
    }
    let mut codes = [0i32; NUM_VARIABLES];
    for var in Variable::ALL {
        let values: Vec<i32> = rows.iter().map(|a| a.get(var)).collect();
        codes[var.index()] = if var.is_numeric() {
            snap_mean(var, &values)
        } else {
            majority(&values)
        };
    }
    let arch = Architecture::from_codes(&codes).expect("domain values");
    Some(rules.repair(&arch))
}

fn snap_mean(var: Variable, values: &[i32]) -> i32 {
    let present: Vec<f64> = values
        .iter()
        .filter(|&&v| v != -1)
        .map(|&v| v as f64)
        .collect();
    if present.is_empty() {
        return -1;
    }
    let mean = present.iter().sum::<f64>() / present.len() as f64;
    let mut best = None::<(f64, i32)>;
    for &c in var.canonical_domain().iter().filter(|&&c| c != -1) {
        let gap = (c as f64 - mean).abs();
        best = match best {
            Some((g, b)) if g < gap - 1e-9 || ((g - gap).abs() <= 1e-9 && b > c) => Some((g, b)),
            _ => Some((gap, c)),
        };
    }
    best.expect("nonempty domain").1
}

fn majority(values: &[i32]) -> i32 {
    let mut counts: Vec<(i32, usize)> = Vec::new();
    for &v in values {
        match counts.iter_mut().find(|(c, _)| *c == v) {
            Some((_, n)) => *n += 1,
            None => counts.push((v, 1)),
        }
    }
    counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    counts[0].0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design_space::Cap;

    #[test]
    fn metrics() {
        assert_eq!(relative_time_to_solution(12.0, 1200.0), 1.0);
        assert_eq!(relative_time_to_solution(5.0, 5.0), 100.0);
        assert_eq!(relative_calls_to_solution(2, 200), 1.0);
        assert_eq!(relative_calls_to_solution(200, 200), 100.0);
    }

    #[test]
    fn universal_rules() {
        let base = Architecture::fully_parallel();
        let mut rows = vec![base; 3];
        rows[0].xy_d = Cap::new(50).unwrap();
        rows[1].xy_d = Cap::new(100).unwrap();
        rows[2].xy_d = Cap::NA;
        rows[0].router = crate::design_space::Router::ShuttleBasedSwap;
        let rules = RuleSet::empty();
        let u = universal_recommendation(&rows, &rules).unwrap();
        assert_eq!(u.xy_d, Cap::new(75).unwrap());
        assert_eq!(u.router, base.router);
        assert_eq!(
            universal_recommendation(&[base], &RuleSet::shipped()),
            Some(base)
        );
        // a mean of 37.5 is equally far from 25 and 50
        assert_eq!(snap_mean(Variable::XyD, &[25, 50]), 50);
        assert_eq!(snap_mean(Variable::Degree, &[4, 6, 8, 8]), 6);
        assert_eq!(snap_mean(Variable::XyD, &[-1, -1]), -1);
        assert_eq!(majority(&[1, 0, 1, 0]), 0);
    }
}
