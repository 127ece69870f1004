//! Iterative architecture search.
//!
//! Every method runs the same loop: propose a population, score it through
//! the memoizing [`Evaluator`], record the iteration and check the
//! termination conditions. Five policies are available: random sampling,
//! simulated annealing, Bayesian optimization, a genetic algorithm and ant
//! colony optimization.

mod annealing;
mod bayes;
mod colony;
mod evaluator;
mod genetic;
mod random;
mod rng;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design_space::{ArchId, Architecture, DesignSpace};

pub use annealing::{acceptance_probability, ShellSampler};
pub use bayes::{acquisition, Acquisition, GaussianProcess, Kernel, JITTER_MAX, JITTER_START};
pub use colony::{pheromone_deposit, ArchTree, MAX_PH, MIN_PH};
pub use evaluator::{
    CircuitObjective, EspScale, EvalError, Evaluation, Evaluator, Objective, TableObjective,
};
pub use genetic::{crossover, generation_counts};
pub use rng::component_rng;

/// Draw budget for rejection loops (GA offspring, SA shells on large spaces).
pub const RESAMPLE_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("the design space has no valid architecture")]
    EmptySpace,
    #[error("no termination condition set")]
    NoTermination,
    #[error("{what}: no valid architecture after {budget} draws")]
    ResampleBudget { what: &'static str, budget: usize },
    #[error("covariance matrix not positive definite with jitter up to {jitter:e}")]
    Covariance { jitter: f64 },
    #[error("unknown optimizer preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealingParams {
    pub t_start: f64,
    pub step_size: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BayesParams {
    pub acquisition: Acquisition,
    pub kernel: Kernel,
    pub history: usize,
    pub candidates: usize,
    pub population: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneticParams {
    pub population: usize,
    pub p_mut: f64,
    pub tournament: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColonyParams {
    pub ants: usize,
    pub p_exploit: f64,
    pub decay: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Method {
    Random,
    Annealing(AnnealingParams),
    Bayes(BayesParams),
    Genetic(GeneticParams),
    Colony(ColonyParams),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub method: Method,
    #[serde(default)]
    pub scale: EspScale,
}

impl OptimizerConfig {
    pub fn new(method: Method) -> Self {
        OptimizerConfig {
            method,
            scale: EspScale::Probability,
        }
    }

    pub fn random() -> Self {
        Self::new(Method::Random)
    }

    pub fn annealing(t_start: f64, step_size: f64) -> Self {
        Self::new(Method::Annealing(AnnealingParams { t_start, step_size }))
    }

    pub fn bayes(acquisition: Acquisition, kernel: Kernel) -> Self {
        Self::new(Method::Bayes(BayesParams {
            acquisition,
            kernel,
            history: 300,
            candidates: 1000,
            population: 50,
        }))
    }

    pub fn genetic(population: usize, p_mut: f64) -> Self {
        Self::new(Method::Genetic(GeneticParams {
            population,
            p_mut,
            tournament: 5,
        }))
    }

    pub fn colony(ants: usize, p_exploit: f64) -> Self {
        Self::new(Method::Colony(ColonyParams {
            ants,
            p_exploit,
            decay: 0.1,
        }))
    }

    pub fn with_scale(mut self, scale: EspScale) -> Self {
        self.scale = scale;
        self
    }

    /// The seventeen standard configurations in table order.
    pub fn presets() -> Vec<OptimizerConfig> {
        let mut out = vec![Self::random()];
        for t in [50.0, 20.0] {
            for s in [2.0, 3.0] {
                out.push(Self::annealing(t, s));
            }
        }
        for a in [Acquisition::Ei, Acquisition::Ucb] {
            for k in [Kernel::Gaussian, Kernel::Matern] {
                out.push(Self::bayes(a, k));
            }
        }
        for n in [50, 100] {
            for p in [0.15, 0.2] {
                out.push(Self::genetic(n, p));
            }
        }
        for n in [50, 100] {
            for p in [0.1, 0.3] {
                out.push(Self::colony(n, p));
            }
        }
        out
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for OptimizerConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.method {
            Method::Random => write!(f, "RS"),
            Method::Annealing(p) => write!(f, "SA[{},{}]", p.t_start, p.step_size),
            Method::Bayes(p) => write!(f, "BO[{},{}]", p.acquisition, p.kernel),
            Method::Genetic(p) => write!(f, "GA[{},{}]", p.population, p.p_mut),
            Method::Colony(p) => write!(f, "ACO[{},{}]", p.ants, p.p_exploit),
        }
    }
}

impl FromStr for OptimizerConfig {
    type Err = OptimizeError;

    fn from_str(s: &str) -> Result<Self, OptimizeError> {
        let bad = || OptimizeError::UnknownPreset(s.to_string());
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.eq_ignore_ascii_case("RS") {
            return Ok(Self::random());
        }
        let open = text.find('[').ok_or_else(bad)?;
        let body = text[open + 1..].strip_suffix(']').ok_or_else(bad)?;
        let (a, b) = body.split_once(',').ok_or_else(bad)?;
        let num = |x: &str| x.parse::<f64>().ok().filter(|v| v.is_finite() && *v >= 0.0);
        let count = |x: &str| x.parse::<usize>().ok().filter(|&v| v >= 2);
        match text[..open].to_ascii_uppercase().as_str() {
            "SA" => {
                let (t, step) = (num(a).ok_or_else(bad)?, num(b).ok_or_else(bad)?);
                if t <= 0.0 || step <= 0.0 {
                    return Err(bad());
                }
                Ok(Self::annealing(t, step))
            }
            "BO" => Ok(Self::bayes(
                a.parse().map_err(|_| bad())?,
                b.parse().map_err(|_| bad())?,
            )),
            "GA" => {
                let p = num(b).filter(|p| *p <= 1.0).ok_or_else(bad)?;
                Ok(Self::genetic(count(a).ok_or_else(bad)?, p))
            }
            "ACO" => {
                let p = num(b).filter(|p| *p <= 1.0).ok_or_else(bad)?;
                Ok(Self::colony(count(a).ok_or_else(bad)?, p))
            }
            _ => Err(bad()),
        }
    }
}

/// Stop rules, checked once per iteration. Any satisfied rule ends the run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Termination {
    /// Stop once the best log ESP is within 1e-12 of this value or above.
    pub target_log_esp: Option<f64>,
    /// Seconds.
    pub wall_clock: Option<f64>,
    /// Stop once unique calls exceed this fraction of the valid space.
    pub call_fraction: Option<f64>,
    pub max_iterations: Option<u64>,
}

pub const TARGET_TOLERANCE: f64 = 1e-12;

impl Termination {
    pub fn target(log_esp: f64) -> Self {
        Termination {
            target_log_esp: Some(log_esp),
            ..Default::default()
        }
    }

    pub fn iterations(n: u64) -> Self {
        Termination {
            max_iterations: Some(n),
            ..Default::default()
        }
    }

    pub fn is_set(&self) -> bool {
        self.target_log_esp.is_some()
            || self.wall_clock.is_some()
            || self.call_fraction.is_some()
            || self.max_iterations.is_some()
    }

    fn check(
        &self,
        best: f64,
        unique: u64,
        valid: u64,
        iteration: u64,
        elapsed: Duration,
    ) -> Option<StopReason> {
        if let Some(t) = self.target_log_esp {
            if best >= t - TARGET_TOLERANCE {
                return Some(StopReason::TargetReached);
            }
        }
        if let Some(f) = self.call_fraction {
            if unique as f64 > f * valid as f64 {
                return Some(StopReason::CallFraction);
            }
        }
        if let Some(n) = self.max_iterations {
            if iteration >= n {
                return Some(StopReason::MaxIterations);
            }
        }
        if let Some(w) = self.wall_clock {
            if elapsed.as_secs_f64() >= w {
                return Some(StopReason::WallClock);
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    TargetReached,
    WallClock,
    CallFraction,
    MaxIterations,
    /// Every valid architecture has been evaluated, or the policy has
    /// nothing new to propose.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: u64,
    pub evaluated: Vec<ArchId>,
    /// Unique calls made by the run up to and including this iteration.
    pub calls: u64,
    #[serde(with = "finite_or_null")]
    pub best_log_esp: f64,
}

/// Everything a run produced except wall-clock measurements, so that
/// records of identical runs compare byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub optimizer: String,
    pub config: OptimizerConfig,
    pub circuit: String,
    pub seed: u64,
    pub termination: Termination,
    pub stop: StopReason,
    pub best: Option<Architecture>,
    pub best_id: Option<ArchId>,
    #[serde(with = "finite_or_null")]
    pub best_log_esp: f64,
    pub unique_calls: u64,
    pub cache_hits: u64,
    pub failures: usize,
    pub valid_count: u64,
    pub iterations: u64,
    pub trajectory: Vec<IterationRecord>,
}

impl RunRecord {
    /// Iteration at which the final best value first appeared.
    pub fn best_found_at(&self) -> Option<u64> {
        self.trajectory
            .iter()
            .find(|it| it.best_log_esp == self.best_log_esp)
            .map(|it| it.iteration)
    }
}

/// Wall-clock side of a run, persisted next to the record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTiming {
    pub wall_time: f64,
    /// Seconds from start until the iteration that first hit the final best.
    pub time_to_best: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub timing: RunTiming,
}

/// A search policy. `iterate` proposes and evaluates one population and
/// returns the ids it evaluated, or `None` when it has nothing left to try.
trait Policy {
    fn iterate(
        &mut self,
        iteration: u64,
        space: &DesignSpace,
        eval: &mut Evaluator<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Option<Vec<ArchId>>, OptimizeError>;
}

fn policy_for(config: &OptimizerConfig, space: &DesignSpace) -> (Box<dyn Policy>, &'static str) {
    match config.method {
        Method::Random => (Box::new(random::RandomSampling), "rs"),
        Method::Annealing(p) => (Box::new(annealing::Annealing::new(p, space)), "sa"),
        Method::Bayes(p) => (Box::new(bayes::Bayes::new(p)), "bo"),
        Method::Genetic(p) => (Box::new(genetic::Genetic::new(p)), "ga"),
        Method::Colony(p) => (Box::new(colony::Colony::new(p, space)), "aco"),
    }
}

/// Runs `config` over `space` until `termination` fires or the space is
/// exhausted. The evaluator may carry a warm cache; its counters are
/// reported as they stand at the end.
pub fn run(
    config: &OptimizerConfig,
    space: &DesignSpace,
    eval: &mut Evaluator<'_>,
    termination: &Termination,
    seed: u64,
    circuit: &str,
) -> Result<RunOutcome, OptimizeError> {
    if !termination.is_set() {
        return Err(OptimizeError::NoTermination);
    }
    let valid = space.valid_count();
    if valid == 0 {
        return Err(OptimizeError::EmptySpace);
    }
    let start = Instant::now();
    eval.set_scale(config.scale);
    let calls_before = eval.unique_calls();
    let hits_before = eval.cache_hits();
    // a warm cache may hold ids from outside the space; policies only
    // propose valid ids, so new calls are all in the space
    let ids = space.valid_ids();
    let seen_before = eval
        .history()
        .iter()
        .filter(|id| ids.binary_search(id).is_ok())
        .count() as u64;
    let (mut policy, label) = policy_for(config, space);
    let mut rng = rng::component_rng(seed, label);
    let mut trajectory = Vec::new();
    let mut time_to_best = 0.0;
    let mut last_best = f64::NAN;
    let mut iteration = 0u64;
    let stop = loop {
        iteration += 1;
        let Some(evaluated) = policy.iterate(iteration, space, eval, &mut rng)? else {
            iteration -= 1;
            break StopReason::Exhausted;
        };
        let best = eval.best().map_or(f64::NEG_INFINITY, |e| e.log_esp);
        if best != last_best {
            last_best = best;
            time_to_best = start.elapsed().as_secs_f64();
        }
        let unique = seen_before + eval.unique_calls() - calls_before;
        trajectory.push(IterationRecord {
            iteration,
            evaluated,
            calls: eval.unique_calls() - calls_before,
            best_log_esp: best,
        });
        if let Some(reason) = termination.check(
            best,
            unique - seen_before,
            valid,
            iteration,
            start.elapsed(),
        ) {
            break reason;
        }
        if unique >= valid {
            break StopReason::Exhausted;
        }
    };
    let best = eval.best().cloned();
    let record = RunRecord {
        optimizer: config.name(),
        config: *config,
        circuit: circuit.to_string(),
        seed,
        termination: termination.clone(),
        stop,
        best: best.as_ref().and_then(|b| Architecture::from_id(b.id)),
        best_id: best.as_ref().map(|b| b.id),
        best_log_esp: best.as_ref().map_or(f64::NEG_INFINITY, |b| b.log_esp),
        unique_calls: eval.unique_calls() - calls_before,
        cache_hits: eval.cache_hits() - hits_before,
        failures: eval.failures(),
        valid_count: valid,
        iterations: iteration,
        trajectory,
    };
    Ok(RunOutcome {
        record,
        timing: RunTiming {
            wall_time: start.elapsed().as_secs_f64(),
            time_to_best,
        },
    })
}

/// Uniform draw from the valid architectures of `space`.
pub(crate) fn uniform_valid(space: &DesignSpace, rng: &mut ChaCha8Rng) -> ArchId {
    let ids = space.valid_ids();
    ids[rng.random_range(0..ids.len())]
}

/// Up to `k` distinct valid ids not yet in the evaluator's cache, uniformly
/// without replacement, returned in draw order.
pub(crate) fn unsampled_valid(
    space: &DesignSpace,
    eval: &Evaluator<'_>,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<ArchId> {
    let ids = space.valid_ids();
    let seen = ids.len().min(eval.unique_calls() as usize);
    if (ids.len() - seen) >= 4 * k && seen <= ids.len() / 2 {
        let mut out = Vec::with_capacity(k);
        let mut picked = std::collections::HashSet::with_capacity(k);
        while out.len() < k {
            let id = ids[rng.random_range(0..ids.len())];
            if !eval.contains(id) && picked.insert(id) {
                out.push(id);
            }
        }
        return out;
    }
    let mut pool: Vec<ArchId> = ids
        .iter()
        .copied()
        .filter(|&id| !eval.contains(id))
        .collect();
    let take = k.min(pool.len());
    for i in 0..take {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(take);
    pool
}

/// Serializes non-finite floats as `null` and reads `null` back as `-inf`.
pub mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_presets_round_trip() {
        let presets = OptimizerConfig::presets();
        assert_eq!(presets.len(), 17);
        let names: Vec<String> = presets.iter().map(|p| p.name()).collect();
        assert_eq!(names[0], "RS");
        assert!(names.contains(&"SA[20,3]".to_string()));
        assert!(names.contains(&"BO[EI,Ma]".to_string()));
        assert!(names.contains(&"GA[100,0.2]".to_string()));
        assert!(names.contains(&"ACO[50,0.1]".to_string()));
        for p in &presets {
            assert_eq!(&p.name().parse::<OptimizerConfig>().unwrap(), p);
        }
        assert!("GA[1,0.2]".parse::<OptimizerConfig>().is_err());
        assert!("XX[1,2]".parse::<OptimizerConfig>().is_err());
    }

    #[test]
    fn termination_rules() {
        let t = Termination {
            target_log_esp: Some(-1.0),
            call_fraction: Some(0.5),
            ..Default::default()
        };
        assert_eq!(
            t.check(-1.0 - 1e-13, 0, 10, 1, Duration::ZERO),
            Some(StopReason::TargetReached)
        );
        assert_eq!(t.check(-2.0, 5, 10, 1, Duration::ZERO), None);
        assert_eq!(
            t.check(-2.0, 6, 10, 1, Duration::ZERO),
            Some(StopReason::CallFraction)
        );
        assert!(!Termination::default().is_set());
    }
}
