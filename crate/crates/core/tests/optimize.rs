mod common;

use proptest::prelude::*;
use spindse::design_space::{ArchId, Architecture, DesignSpace, Variable};
use spindse::optimize::{
    run, EspScale, Evaluator, OptimizeError, OptimizerConfig, RunOutcome, StopReason, Termination,
};

use common::{small_space, Peak};

fn peak_of(space: &DesignSpace) -> Peak {
    Peak(Architecture::from_id(space.valid_ids()[space.valid_ids().len() / 2]).unwrap())
}

fn run_on(
    config: &OptimizerConfig,
    space: &DesignSpace,
    tc: &Termination,
    seed: u64,
) -> RunOutcome {
    let peak = peak_of(space);
    let mut eval = Evaluator::new(&peak, config.scale);
    run(config, space, &mut eval, tc, seed, "peak").unwrap()
}

#[test]
fn preset_names_round_trip() {
    let presets = OptimizerConfig::presets();
    assert_eq!(presets.len(), 17);
    let names: Vec<String> = presets.iter().map(|p| p.name()).collect();
    assert_eq!(names[0], "RS");
    assert_eq!(names[1], "SA[50,2]");
    assert_eq!(names[5], "BO[EI,Ga]");
    assert_eq!(names[12], "GA[100,0.2]");
    assert_eq!(names[16], "ACO[100,0.3]");
    for p in &presets {
        assert_eq!(&p.name().parse::<OptimizerConfig>().unwrap(), p);
    }
    assert!(matches!(
        "GA[1,0.2]".parse::<OptimizerConfig>(),
        Err(OptimizeError::UnknownPreset(_))
    ));
    assert!("XX[1,2]".parse::<OptimizerConfig>().is_err());
}

#[test]
fn random_sampling_is_seeded() {
    let space = DesignSpace::shipped();
    let tc = Termination::iterations(200);
    let ids = |seed| -> Vec<ArchId> {
        run_on(&OptimizerConfig::random(), &space, &tc, seed)
            .record
            .trajectory
            .iter()
            .flat_map(|it| it.evaluated.clone())
            .collect()
    };
    assert_eq!(ids(1), ids(1));
    assert_ne!(ids(1), ids(2));
}

#[test]
fn random_sampling_is_uniform() {
    let space = DesignSpace::shipped();
    let draws = 20_000;
    let out = run_on(
        &OptimizerConfig::random(),
        &space,
        &Termination::iterations(draws),
        4,
    );
    let valid = space.valid_ids();
    let bins = 20;
    let mut counts = vec![0usize; bins];
    for it in &out.record.trajectory {
        let pos = valid.binary_search(&it.evaluated[0]).unwrap();
        counts[pos * bins / valid.len()] += 1;
    }
    let expected = draws as f64 / bins as f64;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    // 19 degrees of freedom, p = 0.001
    assert!(chi2 < 43.82, "chi2 {chi2}, counts {counts:?}");
}

#[test]
fn iteration_limit_bounds_calls() {
    let space = DesignSpace::shipped();
    let out = run_on(
        &OptimizerConfig::random(),
        &space,
        &Termination::iterations(37),
        8,
    );
    assert_eq!(out.record.stop, StopReason::MaxIterations);
    assert_eq!(out.record.iterations, 37);
    assert!(out.record.unique_calls <= 37);
    assert_eq!(out.record.unique_calls + out.record.cache_hits, 37);
}

#[test]
fn singleton_space_is_solved_at_once() {
    let arch = Architecture::fully_parallel();
    let mut space = DesignSpace::shipped();
    for var in Variable::ALL {
        space = space.restrict(var, &[arch.get(var)]).unwrap();
    }
    assert_eq!(space.valid_count(), 1);
    for p in OptimizerConfig::presets() {
        let out = run_on(&p, &space, &Termination::iterations(50), 0);
        assert_eq!(out.record.best_id, Some(arch.id()), "{p}");
        assert_eq!(out.record.best_found_at(), Some(1), "{p}");
        assert_eq!(out.record.stop, StopReason::Exhausted, "{p}");
    }
}

#[test]
fn missing_termination_is_an_error() {
    let space = small_space();
    let peak = peak_of(&space);
    let mut eval = Evaluator::new(&peak, EspScale::Probability);
    let err = run(
        &OptimizerConfig::random(),
        &space,
        &mut eval,
        &Termination::default(),
        0,
        "peak",
    );
    assert_eq!(err.unwrap_err(), OptimizeError::NoTermination);
}

#[test]
fn best_so_far_never_drops() {
    let space = small_space();
    let tc = Termination::iterations(12);
    for p in OptimizerConfig::presets() {
        let out = run_on(&p, &space, &tc, 2);
        let bests: Vec<f64> = out
            .record
            .trajectory
            .iter()
            .map(|it| it.best_log_esp)
            .collect();
        assert!(bests.windows(2).all(|w| w[1] >= w[0]), "{p}");
        let calls: Vec<u64> = out.record.trajectory.iter().map(|it| it.calls).collect();
        assert!(calls.windows(2).all(|w| w[1] >= w[0]), "{p}");
        assert!(out.record.unique_calls <= space.valid_count(), "{p}");
    }
}

#[test]
fn target_stops_on_the_peak() {
    let space = small_space();
    let peak = peak_of(&space);
    let tc = Termination::target(0.0);
    for p in ["SA[20,3]", "GA[50,0.2]", "BO[EI,Ma]"] {
        let config: OptimizerConfig = p.parse().unwrap();
        let mut eval = Evaluator::new(&peak, config.scale);
        let out = run(&config, &space, &mut eval, &tc, 6, "peak").unwrap();
        assert_eq!(out.record.stop, StopReason::TargetReached, "{p}");
        assert_eq!(out.record.best_id, Some(peak.0.id()), "{p}");
    }
}

#[test]
fn warm_cache_reports_per_run_counts() {
    let space = small_space();
    let peak = peak_of(&space);
    let mut eval = Evaluator::new(&peak, EspScale::Probability);
    let tc = Termination::iterations(100);
    let first = run(
        &OptimizerConfig::random(),
        &space,
        &mut eval,
        &tc,
        1,
        "peak",
    )
    .unwrap();
    let second = run(
        &OptimizerConfig::random(),
        &space,
        &mut eval,
        &tc,
        1,
        "peak",
    )
    .unwrap();
    assert!(first.record.unique_calls > 0);
    assert_eq!(second.record.unique_calls, 0);
    assert_eq!(second.record.cache_hits, 100);
}

#[test]
fn normalized_log_scale_keeps_the_argmax() {
    let space = small_space();
    let tc = Termination::iterations(30);
    let a = run_on(&OptimizerConfig::genetic(50, 0.2), &space, &tc, 3);
    let b = run_on(
        &OptimizerConfig::genetic(50, 0.2).with_scale(EspScale::NormalizedLog),
        &space,
        &tc,
        3,
    );
    // rank-based selection sees the same order on both scales
    assert_eq!(a.record.trajectory, b.record.trajectory);
}

#[test]
fn run_records_serialize_identically() {
    let space = small_space();
    let tc = Termination::iterations(20);
    for p in OptimizerConfig::presets() {
        let a = serde_json::to_string(&run_on(&p, &space, &tc, 5).record).unwrap();
        let b = serde_json::to_string(&run_on(&p, &space, &tc, 5).record).unwrap();
        assert_eq!(a, b, "{p}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluator_counters_add_up(picks in proptest::collection::vec(0usize..478, 1..200)) {
        let space = small_space();
        let peak = peak_of(&space);
        let mut eval = Evaluator::new(&peak, EspScale::Probability);
        let ids: Vec<ArchId> = picks.iter().map(|&i| space.valid_ids()[i]).collect();
        let (head, tail) = ids.split_at(ids.len() / 2);
        for &id in head {
            eval.evaluate(id);
        }
        eval.evaluate_batch(tail);
        let mut distinct = ids.clone();
        distinct.sort();
        distinct.dedup();
        prop_assert_eq!(eval.unique_calls() + eval.cache_hits(), ids.len() as u64);
        prop_assert_eq!(eval.unique_calls(), distinct.len() as u64);
    }
}
