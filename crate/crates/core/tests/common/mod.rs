#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use spindse::circuit::{Circuit, Gate};
use spindse::design_space::{Architecture, DesignSpace};
use spindse::esp::EspBreakdown;
use spindse::optimize::{EvalError, Objective};

pub fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

/// The 478-architecture slice used for exhaustive comparisons.
pub fn small_space() -> DesignSpace {
    let mut space = DesignSpace::shipped();
    for spec in [
        "xyD=-1,100",
        "zD=-1,100",
        "tqgD=100",
        "sD=100",
        "degree=4,8",
        "xy_z_tqg=0",
    ] {
        space = space.restrict_spec(spec).unwrap();
    }
    space
}

pub fn random_circuit(rng: &mut ChaCha8Rng, n: usize, gates: usize) -> Circuit {
    let mut out = Vec::with_capacity(gates);
    for _ in 0..gates {
        let a = rng.random_range(0..n);
        let b = (a + rng.random_range(1..n)) % n;
        let angle = rng.random_range(-3.0..3.0);
        out.push(match rng.random_range(0..6) {
            0 => Gate::rx(a, angle),
            1 => Gate::ry(a, angle),
            2 => Gate::rz(a, angle),
            3 => Gate::cz(a, b),
            4 => Gate::cx(a, b),
            _ => Gate::swap(a, b),
        });
    }
    Circuit::new(format!("random_{n}"), n, out).unwrap()
}

pub fn random_valid(rng: &mut ChaCha8Rng, space: &DesignSpace) -> Architecture {
    let ids = space.valid_ids();
    Architecture::from_id(ids[rng.random_range(0..ids.len())]).unwrap()
}

/// Smooth synthetic landscape: log ESP falls off with the L1 distance of the
/// ordinal coordinates from a peak.
pub struct Peak(pub Architecture);

impl Objective for Peak {
    fn evaluate(&self, arch: &Architecture) -> Result<EspBreakdown, EvalError> {
        let d = spindse::design_space::distance(arch, &self.0) as f64;
        Ok(EspBreakdown::from_terms(-0.05 * d, 0.0, 0.0, 0.0, 0))
    }

    fn name(&self) -> String {
        "peak".into()
    }
}
