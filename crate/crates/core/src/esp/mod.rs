//! Estimated Success Probability of compiled circuits.
//!
//! Everything is accumulated in the log domain:
//!
//! - gates: `sum log F` over all ops,
//! - crosstalk: for every pair of ops sharing a cycle, the number of
//!   couplers joining their dots times the log of the harmonic mean of
//!   their fidelities,
//! - decoherence: `-N * t / T2*` where `t` sums the longest op of each
//!   cycle.

mod noise;

use serde::{Deserialize, Serialize};

use crate::compiler::{CompiledCircuit, PlacedOp, Topology};

pub use noise::{NoiseConfig, NoiseConfigBuilder, NoiseConfigError, NOISE_FORMAT_TAG};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EspBreakdown {
    pub log_gates: f64,
    pub log_crosstalk: f64,
    pub log_decoherence: f64,
    pub log_esp: f64,
    pub esp: f64,
    /// Seconds.
    pub total_time: f64,
    /// Couplers counted by the crosstalk term, summed over op pairs.
    pub crosstalk_links: usize,
    /// `esp` rounded to zero although `log_esp` is finite.
    pub underflow: bool,
}

impl EspBreakdown {
    pub fn from_terms(
        log_gates: f64,
        log_crosstalk: f64,
        log_decoherence: f64,
        total_time: f64,
        crosstalk_links: usize,
    ) -> EspBreakdown {
        let log_esp = log_gates + log_crosstalk + log_decoherence;
        let esp = log_esp.exp();
        EspBreakdown {
            log_gates,
            log_crosstalk,
            log_decoherence,
            log_esp,
            esp,
            total_time,
            crosstalk_links,
            underflow: esp < f64::MIN_POSITIVE && log_esp.is_finite(),
        }
    }
}

/// Op pairs of one cycle joined by at least one coupler, with the coupler
/// count.
pub fn crosstalk_pairs(ops: &[PlacedOp], topo: &Topology) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let links = topo.links_between(&ops[i].sites, &ops[j].sites);
            if links > 0 {
                out.push((i, j, links));
            }
        }
    }
    out
}

/// Log of the crosstalk factor between two simultaneous ops joined by
/// `links` couplers.
pub fn log_crosstalk_factor(links: usize, f_i: f64, f_j: f64) -> f64 {
    let harmonic = 2.0 * f_i * f_j / (f_i + f_j);
    links as f64 * harmonic.ln()
}

fn op_fidelity(op: &PlacedOp, noise: &NoiseConfig) -> f64 {
    noise.fidelity(op.kind, op.flavor)
}

/// Log-domain ESP of one cycle listing on `topo`.
pub fn estimate_cycles(
    cycles: &[Vec<PlacedOp>],
    n_qubits: usize,
    topo: &Topology,
    noise: &NoiseConfig,
) -> EspBreakdown {
    let mut log_gates = 0.0;
    let mut log_crosstalk = 0.0;
    let mut total_time = 0.0;
    let mut total_links = 0;
    for ops in cycles {
        let mut longest: f64 = 0.0;
        for op in ops {
            log_gates += noise.log_fidelity(op.kind, op.flavor);
            longest = longest.max(noise.duration(op.kind, op.flavor));
        }
        for (i, j, links) in crosstalk_pairs(ops, topo) {
            log_crosstalk += log_crosstalk_factor(
                links,
                op_fidelity(&ops[i], noise),
                op_fidelity(&ops[j], noise),
            );
            total_links += links;
        }
        total_time += longest;
    }
    let log_decoherence = -(n_qubits as f64) * total_time / noise.t2_star;
    EspBreakdown::from_terms(
        log_gates,
        log_crosstalk,
        log_decoherence,
        total_time,
        total_links,
    )
}

pub fn estimate(compiled: &CompiledCircuit, noise: &NoiseConfig) -> EspBreakdown {
    estimate_cycles(
        &compiled.cycles,
        compiled.n_qubits,
        &compiled.topology,
        noise,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crosstalk_factor_equal_fidelities() {
        let f = 0.9998f64;
        assert!((log_crosstalk_factor(3, f, f) - 3.0 * f.ln()).abs() < 1e-15);
        assert_eq!(log_crosstalk_factor(0, 0.5, 0.9), 0.0);
    }

    #[test]
    fn underflow_flag() {
        let b = EspBreakdown::from_terms(-800.0, 0.0, 0.0, 0.0, 0);
        assert!(b.underflow);
        assert_eq!(b.esp, 0.0);
        let b = EspBreakdown::from_terms(-1.0, -0.5, -0.25, 1e-6, 2);
        assert!(!b.underflow);
        assert!((b.log_esp + 1.75).abs() < 1e-15);
    }
}
