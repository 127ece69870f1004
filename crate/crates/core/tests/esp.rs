mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spindse::circuit::{Circuit, Gate};
use spindse::compiler::compile;
use spindse::design_space::{Architecture, DesignSpace};
use spindse::esp::{estimate, NoiseConfig};

use common::{random_circuit, random_valid};

fn noise_with_t2(t2: f64) -> NoiseConfig {
    NoiseConfig {
        t2_star: t2,
        ..Default::default()
    }
}

#[test]
fn single_rotation_fixture() {
    let noise = NoiseConfig::default();
    let c = Circuit::new("rx", 1, vec![Gate::rx(0, 1.0)]).unwrap();
    let b = estimate(
        &compile(&c, &Architecture::fully_parallel(), &noise).unwrap(),
        &noise,
    );
    assert!((b.esp - 0.9999 * (-0.01f64).exp()).abs() < 1e-12);
    assert_eq!(b.crosstalk_links, 0);
    assert!((b.total_time - 100e-9).abs() < 1e-18);
}

#[test]
fn empty_circuit_is_certain() {
    let noise = NoiseConfig::default();
    let c = Circuit::new("empty", 3, vec![]).unwrap();
    let b = estimate(
        &compile(&c, &Architecture::fully_parallel(), &noise).unwrap(),
        &noise,
    );
    assert_eq!(b.log_esp, 0.0);
    assert_eq!(b.esp, 1.0);
}

#[test]
fn long_circuits_flag_underflow() {
    let noise = NoiseConfig::default();
    let gates: Vec<Gate> = (0..20_000).map(|i| Gate::cz(i % 4, (i + 1) % 4)).collect();
    let c = Circuit::new("long", 4, gates).unwrap();
    let b = estimate(
        &compile(&c, &Architecture::fully_parallel(), &noise).unwrap(),
        &noise,
    );
    assert!(b.log_esp.is_finite());
    assert!(b.log_esp < -700.0);
    assert_eq!(b.esp, 0.0);
    assert!(b.underflow);
}

#[test]
fn terms_add_up() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let space = DesignSpace::shipped();
    let noise = NoiseConfig::default();
    for _ in 0..30 {
        let c = random_circuit(&mut rng, 6, 30);
        let arch = random_valid(&mut rng, &space);
        let b = estimate(&compile(&c, &arch, &noise).unwrap(), &noise);
        assert!((b.log_esp - (b.log_gates + b.log_crosstalk + b.log_decoherence)).abs() < 1e-12);
        assert!(b.log_gates <= 0.0 && b.log_crosstalk <= 0.0 && b.log_decoherence <= 0.0);
        assert!((b.log_decoherence + 6.0 * b.total_time / noise.t2_star).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn longer_coherence_never_hurts(seed in 0u64..1000, t2 in 1e-6f64..1e-4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = DesignSpace::shipped();
        let c = random_circuit(&mut rng, 5, 20);
        let arch = random_valid(&mut rng, &space);
        let short = noise_with_t2(t2);
        let long = noise_with_t2(2.0 * t2);
        let compiled = compile(&c, &arch, &short).unwrap();
        let a = estimate(&compiled, &short);
        let b = estimate(&compiled, &long);
        prop_assert!(b.log_esp >= a.log_esp);
        prop_assert!(a.esp > 0.0 && a.esp <= 1.0);
    }
}
