mod common;

use spindse::compiler::compile;
use spindse::design_space::{Architecture, RuleSet};
use spindse::esp::{estimate, NoiseConfig};
use spindse::harness::{
    brute_force, compare, load_circuit, relative_calls_to_solution, relative_time_to_solution,
    run_cost, termination_for, universal_recommendation, ExperimentManifest, TargetSpec,
};
use spindse::optimize::{run, Evaluator, OptimizerConfig, Termination};

use common::{corpus, small_space};

#[test]
fn brute_force_matches_a_sequential_rescan() {
    let space = small_space();
    let noise = NoiseConfig::default();
    let circuit = load_circuit(&corpus("grover_4.qasm")).unwrap();
    let bf = brute_force(&circuit, &space, &noise);
    let t = &bf.table;
    assert_eq!(t.valid_count, space.valid_count());
    assert_eq!(t.failures, 0);
    let mut best = (f64::NEG_INFINITY, None);
    for (entry, &id) in t.entries.iter().zip(space.valid_ids()) {
        assert_eq!(entry.id, id);
        let arch = Architecture::from_id(id).unwrap();
        let log_esp = estimate(&compile(&circuit, &arch, &noise).unwrap(), &noise).log_esp;
        assert_eq!(entry.log_esp(), log_esp);
        if log_esp > best.0 {
            best = (log_esp, Some(id));
        }
    }
    assert_eq!(t.best_log_esp, best.0);
    assert_eq!(t.best_id, best.1);
    assert!(t.argmax(0.0).contains(&best.1.unwrap()));
}

#[test]
fn brute_force_is_deterministic() {
    let space = small_space();
    let circuit = load_circuit(&corpus("qft_4.qasm")).unwrap();
    let a = brute_force(&circuit, &space, &NoiseConfig::default());
    let b = brute_force(&circuit, &space, &NoiseConfig::default());
    assert_eq!(a.table, b.table);
    assert_eq!(a.table.argmax(1e-12).len(), 8);
}

#[test]
fn comparison_summaries_follow_the_runs() {
    let space = small_space();
    let circuit = load_circuit(&corpus("qft_4.qasm")).unwrap();
    let brute = brute_force(&circuit, &space, &NoiseConfig::default());
    let oracle = brute.table.best_log_esp;
    let objective = brute.table.objective();
    let tc = Termination {
        target_log_esp: Some(oracle),
        max_iterations: Some(3),
        ..Default::default()
    };
    let presets = [OptimizerConfig::random(), OptimizerConfig::genetic(50, 0.2)];
    let mut runs = Vec::new();
    for p in &presets {
        for seed in 0..4 {
            let mut eval = Evaluator::new(&objective, p.scale);
            runs.push(run(p, &space, &mut eval, &tc, seed, &circuit.name).unwrap());
        }
    }
    let report = compare(&runs, std::slice::from_ref(&brute), &RuleSet::shipped());
    assert_eq!(report.summaries.len(), 2);
    for (s, chunk) in report.summaries.iter().zip(runs.chunks(4)) {
        assert_eq!(s.preset, chunk[0].record.optimizer);
        let costs: Vec<_> = chunk.iter().map(|r| run_cost(r, oracle)).collect();
        let calls: Vec<f64> = costs
            .iter()
            .map(|c| relative_calls_to_solution(c.2, space.valid_count()))
            .collect();
        let times: Vec<f64> = costs
            .iter()
            .map(|c| relative_time_to_solution(c.1, brute.wall_time))
            .collect();
        assert_eq!(s.runs, 4);
        assert_eq!(s.reached, costs.iter().filter(|c| c.0).count());
        assert!((s.mean_relative_calls - calls.iter().sum::<f64>() / 4.0).abs() < 1e-12);
        assert_eq!(
            s.worst_relative_calls,
            calls.iter().cloned().fold(f64::MIN, f64::max)
        );
        assert!((s.mean_relative_time - times.iter().sum::<f64>() / 4.0).abs() < 1e-9);
    }
    assert_eq!(report.best_rows.len(), 1);
    assert_eq!(report.best_rows[0].log_esp, oracle);
    assert_eq!(report.universal, Some(brute.table.best().unwrap()));
}

#[test]
fn universal_recommendation_averages_and_votes() {
    let base = Architecture::fully_parallel();
    let rows = vec![
        base.with(spindse::design_space::Variable::Degree, 4)
            .unwrap(),
        base.with(spindse::design_space::Variable::Degree, 8)
            .unwrap(),
        base.with(spindse::design_space::Variable::Degree, 8)
            .unwrap(),
    ];
    let u = universal_recommendation(&rows, &RuleSet::shipped()).unwrap();
    // mean 6.67 snaps to 6
    assert_eq!(u.get(spindse::design_space::Variable::Degree), 6);
    assert!(RuleSet::shipped().validate(&u).valid);
    assert_eq!(universal_recommendation(&[], &RuleSet::shipped()), None);
}

#[test]
fn default_termination() {
    let tc = termination_for(Some(40.0), None, None, None);
    assert_eq!(tc.wall_clock, Some(2400.0));
    assert_eq!(tc.call_fraction, Some(0.234));
    let tc = termination_for(None, None, Some(-1.0), None);
    assert_eq!(tc.call_fraction, None);
    assert_eq!(tc.target_log_esp, Some(-1.0));
}

#[test]
fn shipped_manifest_parses() {
    let text = std::fs::read_to_string(corpus("small.toml")).unwrap();
    let m: ExperimentManifest = toml::from_str(&text).unwrap();
    assert_eq!(m.circuits.len(), 3);
    assert_eq!(m.tc_target_logesp, Some(TargetSpec::Named("oracle".into())));
    assert!(toml::from_str::<ExperimentManifest>(
        "circuits = []\npresets = []\nout = 'x'\nbogus = 1\n"
    )
    .is_err());
}
