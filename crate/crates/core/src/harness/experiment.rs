use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{brute_force, compare, BruteForce, ComparisonReport};
use crate::circuit::{parse_circuit, Circuit};
use crate::design_space::{DesignSpace, RuleSet};
use crate::esp::NoiseConfig;
use crate::optimize::{
    run, CircuitObjective, EspScale, Evaluator, OptimizerConfig, RunOutcome, Termination,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn default_repetitions() -> usize {
    10
}

fn default_minutes() -> Option<f64> {
    Some(40.0)
}

/// A complete, replayable experiment description. Relative paths are
/// resolved against the manifest's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub circuits: Vec<PathBuf>,
    #[serde(default)]
    pub rules: Option<PathBuf>,
    #[serde(default)]
    pub domains: Option<PathBuf>,
    /// `var=v1,v2` sub-domain restrictions.
    #[serde(default)]
    pub restrict: Vec<String>,
    #[serde(default)]
    pub noise: Option<PathBuf>,
    pub presets: Vec<String>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Run `i` of every preset uses seed `seed + i`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_minutes")]
    pub tc_minutes: Option<f64>,
    /// Defaults to 0.234 when no target is given.
    #[serde(default)]
    pub tc_call_fraction: Option<f64>,
    /// A log ESP, or `"oracle"` for the brute-force maximum of each circuit.
    #[serde(default)]
    pub tc_target_logesp: Option<TargetSpec>,
    #[serde(default)]
    pub tc_max_iterations: Option<u64>,
    #[serde(default)]
    pub scale: EspScale,
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    Value(f64),
    Named(String),
}

impl TargetSpec {
    pub fn parse(text: &str) -> Result<TargetSpec, String> {
        if text.eq_ignore_ascii_case("oracle") {
            Ok(TargetSpec::Named("oracle".into()))
        } else {
            text.parse()
                .map(TargetSpec::Value)
                .map_err(|_| format!("expected a log ESP or `oracle`, got `{text}`"))
        }
    }

    fn resolve(&self, oracle: f64) -> Result<f64, ExperimentError> {
        match self {
            TargetSpec::Value(v) => Ok(*v),
            TargetSpec::Named(s) if s.eq_ignore_ascii_case("oracle") => Ok(oracle),
            TargetSpec::Named(s) => Err(ExperimentError::Invalid(format!("unknown target `{s}`"))),
        }
    }

    pub fn needs_oracle(&self) -> bool {
        matches!(self, TargetSpec::Named(_))
    }
}

/// Termination conditions with the standard defaults: a 40 minute budget,
/// and a 23.4% call budget when no target is set.
pub fn termination_for(
    minutes: Option<f64>,
    call_fraction: Option<f64>,
    target: Option<f64>,
    max_iterations: Option<u64>,
) -> Termination {
    Termination {
        target_log_esp: target,
        wall_clock: minutes.map(|m| m * 60.0),
        call_fraction: call_fraction.or(if target.is_none() { Some(0.234) } else { None }),
        max_iterations,
    }
}

fn read(path: &Path) -> Result<String, ExperimentError> {
    fs::read_to_string(path).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_err(path: &Path, e: impl ToString) -> ExperimentError {
    ExperimentError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub fn load_circuit(path: &Path) -> Result<Circuit, ExperimentError> {
    parse_circuit(&read(path)?).map_err(|e| parse_err(path, e))
}

pub fn load_noise(path: Option<&Path>) -> Result<NoiseConfig, ExperimentError> {
    match path {
        None => Ok(NoiseConfig::default()),
        Some(p) => NoiseConfig::parse(&read(p)?).map_err(|e| parse_err(p, e)),
    }
}

pub fn load_space(
    rules: Option<&Path>,
    domains: Option<&Path>,
    restrict: &[String],
) -> Result<DesignSpace, ExperimentError> {
    let rule_set = match rules {
        None => RuleSet::shipped(),
        Some(p) => RuleSet::parse(&read(p)?).map_err(|e| parse_err(p, e))?,
    };
    let mut space = match domains {
        None => DesignSpace::new(rule_set),
        Some(p) => {
            let doms = DesignSpace::parse_domains(&read(p)?).map_err(|e| parse_err(p, e))?;
            DesignSpace::with_domains(doms, rule_set).map_err(|e| parse_err(p, e))?
        }
    };
    for r in restrict {
        space = space
            .restrict_spec(r)
            .map_err(|e| ExperimentError::Invalid(format!("--restrict {r}: {e}")))?;
    }
    Ok(space)
}

pub struct ExperimentResults {
    pub brutes: Vec<BruteForce>,
    pub runs: Vec<RunOutcome>,
    pub report: ComparisonReport,
}

impl ExperimentManifest {
    #[allow(clippy::type_complexity)]
    fn load(
        &self,
        base: &Path,
    ) -> Result<(Vec<Circuit>, DesignSpace, NoiseConfig, Vec<OptimizerConfig>), ExperimentError>
    {
        let at = |p: &Path| {
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        let circuits = self
            .circuits
            .iter()
            .map(|p| load_circuit(&at(p)))
            .collect::<Result<Vec<_>, _>>()?;
        let space = load_space(
            self.rules.as_deref().map(at).as_deref(),
            self.domains.as_deref().map(at).as_deref(),
            &self.restrict,
        )?;
        let noise = load_noise(self.noise.as_deref().map(at).as_deref())?;
        let presets = self
            .presets
            .iter()
            .map(|p| {
                p.parse::<OptimizerConfig>()
                    .map(|c| c.with_scale(self.scale))
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ExperimentError::Invalid(e.to_string()))?;
        Ok((circuits, space, noise, presets))
    }
}

/// Brute-forces every circuit, then runs every preset `repetitions` times
/// per circuit. Runs execute concurrently; results come back in
/// (circuit, preset, seed) order.
pub fn run_experiment(
    manifest: &ExperimentManifest,
    base: &Path,
) -> Result<ExperimentResults, ExperimentError> {
    let (circuits, space, noise, presets) = manifest.load(base)?;
    if space.valid_count() == 0 {
        return Err(ExperimentError::Invalid(
            "the design space has no valid architecture".into(),
        ));
    }
    let brutes: Vec<BruteForce> = circuits
        .iter()
        .map(|c| brute_force(c, &space, &noise))
        .collect();
    let mut jobs = Vec::new();
    for (ci, circuit) in circuits.iter().enumerate() {
        let target = match &manifest.tc_target_logesp {
            Some(t) => Some(t.resolve(brutes[ci].table.best_log_esp)?),
            None => None,
        };
        let tc = termination_for(
            manifest.tc_minutes,
            manifest.tc_call_fraction,
            target,
            manifest.tc_max_iterations,
        );
        if !tc.is_set() {
            return Err(ExperimentError::Invalid("no termination condition".into()));
        }
        for preset in &presets {
            for i in 0..manifest.repetitions {
                jobs.push((circuit, *preset, manifest.seed + i as u64, tc.clone()));
            }
        }
    }
    let runs = jobs
        .par_iter()
        .map(|(circuit, preset, seed, tc)| {
            let objective = CircuitObjective::new((*circuit).clone(), noise.clone());
            let mut eval = Evaluator::new(&objective, preset.scale);
            run(preset, &space, &mut eval, tc, *seed, &circuit.name)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ExperimentError::Invalid(e.to_string()))?;
    let report = compare(&runs, &brutes, space.rules());
    Ok(ExperimentResults {
        brutes,
        runs,
        report,
    })
}
