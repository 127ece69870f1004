use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;
use crate::compiler::{compile, CompileError};
use crate::design_space::{ArchId, Architecture};
use crate::esp::{estimate, EspBreakdown, NoiseConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("architecture {0} has no entry in the table")]
    Missing(ArchId),
    #[error("{0}")]
    Other(String),
}

/// Black-box score of an architecture.
pub trait Objective: Sync {
    fn evaluate(&self, arch: &Architecture) -> Result<EspBreakdown, EvalError>;

    fn name(&self) -> String;
}

/// Compiles a circuit and scores it with the ESP model.
pub struct CircuitObjective {
    pub circuit: Circuit,
    pub noise: NoiseConfig,
}

impl CircuitObjective {
    pub fn new(circuit: Circuit, noise: NoiseConfig) -> Self {
        CircuitObjective { circuit, noise }
    }
}

impl Objective for CircuitObjective {
    fn evaluate(&self, arch: &Architecture) -> Result<EspBreakdown, EvalError> {
        let compiled = compile(&self.circuit, arch, &self.noise)?;
        Ok(estimate(&compiled, &self.noise))
    }

    fn name(&self) -> String {
        self.circuit.name.clone()
    }
}

/// Looks scores up in a precomputed table, typically a brute-force run.
pub struct TableObjective {
    name: String,
    table: HashMap<ArchId, Result<EspBreakdown, String>>,
}

impl TableObjective {
    pub fn new(
        name: impl Into<String>,
        table: HashMap<ArchId, Result<EspBreakdown, String>>,
    ) -> Self {
        TableObjective {
            name: name.into(),
            table,
        }
    }
}

impl Objective for TableObjective {
    fn evaluate(&self, arch: &Architecture) -> Result<EspBreakdown, EvalError> {
        let id = arch.id();
        match self.table.get(&id) {
            Some(Ok(b)) => Ok(b.clone()),
            Some(Err(e)) => Err(EvalError::Other(e.clone())),
            None => Err(EvalError::Missing(id)),
        }
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

/// Scale on which policies compare architectures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum EspScale {
    /// `exp(log_esp)`.
    #[default]
    Probability,
    /// `1 / (1 + |log_esp|)`, monotone in `log_esp` and free of underflow.
    /// Changes acceptance probabilities and deposits, not the argmax.
    NormalizedLog,
}

impl EspScale {
    pub fn score(self, log_esp: f64) -> f64 {
        match self {
            EspScale::Probability => log_esp.exp(),
            EspScale::NormalizedLog => 1.0 / (1.0 + log_esp.abs()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub id: ArchId,
    /// `-inf` when the architecture failed to compile.
    #[serde(with = "crate::optimize::finite_or_null")]
    pub log_esp: f64,
    pub score: f64,
    pub error: Option<String>,
}

impl Evaluation {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Memoizing front end of an [`Objective`].
pub struct Evaluator<'a> {
    objective: &'a dyn Objective,
    scale: EspScale,
    cache: HashMap<ArchId, Evaluation>,
    order: Vec<ArchId>,
    cache_hits: u64,
    best: Option<ArchId>,
}

impl<'a> Evaluator<'a> {
    pub fn new(objective: &'a dyn Objective, scale: EspScale) -> Self {
        Evaluator {
            objective,
            scale,
            cache: HashMap::new(),
            order: Vec::new(),
            cache_hits: 0,
            best: None,
        }
    }

    pub fn scale(&self) -> EspScale {
        self.scale
    }

    /// Switches the scale and rescores cached entries.
    pub fn set_scale(&mut self, scale: EspScale) {
        self.scale = scale;
        for ev in self.cache.values_mut() {
            ev.score = scale.score(ev.log_esp);
        }
    }

    pub fn evaluate(&mut self, id: ArchId) -> Evaluation {
        self.evaluate_batch(&[id]).pop().expect("one result")
    }

    /// Scores `ids`, compiling uncached architectures concurrently. Results
    /// are committed in id order and returned in request order.
    pub fn evaluate_batch(&mut self, ids: &[ArchId]) -> Vec<Evaluation> {
        let mut fresh: Vec<ArchId> = ids
            .iter()
            .copied()
            .filter(|id| !self.cache.contains_key(id))
            .collect();
        fresh.sort_unstable();
        fresh.dedup();
        self.cache_hits += (ids.len() - fresh.len()) as u64;
        let objective = self.objective;
        let scale = self.scale;
        let results: Vec<Evaluation> = fresh
            .par_iter()
            .map(|&id| {
                let outcome = match Architecture::from_id(id) {
                    Some(arch) => objective.evaluate(&arch),
                    None => Err(EvalError::Other(format!("id {id} out of range"))),
                };
                match outcome {
                    Ok(b) => Evaluation {
                        id,
                        log_esp: b.log_esp,
                        score: scale.score(b.log_esp),
                        error: None,
                    },
                    Err(e) => Evaluation {
                        id,
                        log_esp: f64::NEG_INFINITY,
                        score: scale.score(f64::NEG_INFINITY),
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect();
        for ev in results {
            let better = match self.best {
                None => true,
                Some(b) => ev.log_esp > self.cache[&b].log_esp,
            };
            if better {
                self.best = Some(ev.id);
            }
            self.order.push(ev.id);
            self.cache.insert(ev.id, ev);
        }
        ids.iter().map(|id| self.cache[id].clone()).collect()
    }

    pub fn get(&self, id: ArchId) -> Option<&Evaluation> {
        self.cache.get(&id)
    }

    pub fn contains(&self, id: ArchId) -> bool {
        self.cache.contains_key(&id)
    }

    /// Distinct architectures evaluated, in insertion order.
    pub fn history(&self) -> &[ArchId] {
        &self.order
    }

    pub fn unique_calls(&self) -> u64 {
        self.order.len() as u64
    }

    pub fn cache_hits(&self) -> u64 {
        self.cache_hits
    }

    pub fn failures(&self) -> usize {
        self.cache.values().filter(|e| e.failed()).count()
    }

    pub fn best(&self) -> Option<&Evaluation> {
        self.best.map(|id| &self.cache[&id])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Counting(std::sync::atomic::AtomicUsize);

    impl Objective for Counting {
        fn evaluate(&self, arch: &Architecture) -> Result<EspBreakdown, EvalError> {
            self.0.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
            Ok(EspBreakdown::from_terms(
                -(arch.id().0 as f64) * 1e-7,
                0.0,
                0.0,
                0.0,
                0,
            ))
        }

        fn name(&self) -> String {
            "counting".into()
        }
    }

    #[test]
    fn caches_and_counts() {
        let obj = Counting(Default::default());
        let mut ev = Evaluator::new(&obj, EspScale::Probability);
        let out = ev.evaluate_batch(&[ArchId(5), ArchId(3), ArchId(5)]);
        assert_eq!(out.len(), 3);
        assert_eq!(ev.unique_calls(), 2);
        assert_eq!(ev.cache_hits(), 1);
        assert_eq!(ev.history(), &[ArchId(3), ArchId(5)]);
        ev.evaluate(ArchId(3));
        assert_eq!(obj.0.load(std::sync::atomic::Ordering::SeqCst), 2);
        assert_eq!(ev.cache_hits(), 2);
        assert_eq!(ev.best().unwrap().id, ArchId(3));
    }

    #[test]
    fn scales() {
        assert_eq!(EspScale::Probability.score(0.0), 1.0);
        assert_eq!(EspScale::NormalizedLog.score(-1.0), 0.5);
        assert_eq!(EspScale::Probability.score(f64::NEG_INFINITY), 0.0);
        assert_eq!(EspScale::NormalizedLog.score(f64::NEG_INFINITY), 0.0);
    }
}
