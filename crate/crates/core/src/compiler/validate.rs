//! Cycle-by-cycle audit of the parallelization constraints, written
//! separately from the scheduler so the two can disagree.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::CompiledCircuit;
use crate::circuit::{GateClass, GateKind};
use crate::design_space::{Architecture, SingleQubitImpl};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintViolation {
    pub cycle: usize,
    pub message: String,
}

fn limit(percent: Option<u32>, base: usize) -> usize {
    match percent {
        None => usize::MAX,
        Some(p) => std::cmp::max(1, (base * p as usize) / 100),
    }
}

/// Lists every cycle that breaks a constraint of `arch`.
pub fn validate_constraints(
    compiled: &CompiledCircuit,
    arch: &Architecture,
) -> Vec<ConstraintViolation> {
    let n = compiled.n_qubits;
    let caps: HashMap<GateClass, usize> = HashMap::from([
        (GateClass::Xy, limit(arch.xy_d.percent(), n)),
        (GateClass::Z, limit(arch.z_d.percent(), n)),
        (GateClass::Tqg, limit(arch.tqg_d.percent(), n / 2)),
        (GateClass::Shuttle, limit(arch.s_d.percent(), n)),
    ]);
    let mut out = Vec::new();
    for (cycle, ops) in compiled.cycles.iter().enumerate() {
        let mut report = |message: String| out.push(ConstraintViolation { cycle, message });
        if arch.single_qubit_impl == SingleQubitImpl::Sequential && ops.len() > 1 {
            report(format!("{} ops in a sequential cycle", ops.len()));
        }
        let mut per_class: HashMap<GateClass, usize> = HashMap::new();
        for op in ops {
            *per_class.entry(op.kind.class()).or_default() += 1;
        }
        for (class, count) in &per_class {
            if *count > caps[class] {
                report(format!(
                    "{count} {class:?} ops exceed the cap of {}",
                    caps[class]
                ));
            }
        }
        let gate_classes: BTreeSet<GateClass> = per_class
            .keys()
            .copied()
            .filter(|c| *c != GateClass::Shuttle)
            .collect();
        let allowed = match gate_classes.len() {
            0 | 1 => true,
            2 => {
                arch.xy_z_tqg
                    || if !gate_classes.contains(&GateClass::Tqg) {
                        arch.xy_z
                    } else if !gate_classes.contains(&GateClass::Z) {
                        arch.xy_tqg
                    } else {
                        arch.z_tqg
                    }
            }
            _ => arch.xy_z_tqg || (arch.xy_z && arch.xy_tqg && arch.z_tqg),
        };
        if !allowed {
            report(format!("classes {gate_classes:?} may not share a cycle"));
        }
        let mut used = BTreeSet::new();
        for op in ops {
            for s in &op.sites {
                if !used.insert(*s) {
                    report(format!("dot {s} used twice"));
                }
            }
        }
        if matches!(
            arch.single_qubit_impl,
            SingleQubitImpl::Global | SingleQubitImpl::SemiGlobal
        ) {
            let rotations: Vec<_> = ops
                .iter()
                .filter(|o| matches!(o.kind, GateKind::Rx | GateKind::Ry | GateKind::Rz))
                .collect();
            if let Some(first) = rotations.first() {
                for r in &rotations[1..] {
                    let same_angle = match (r.angle, first.angle) {
                        (Some(a), Some(b)) => (a - b).abs() <= super::ANGLE_TOLERANCE,
                        _ => false,
                    };
                    if r.kind != first.kind || !same_angle {
                        report("single-qubit gates in one cycle differ in axis or angle".into());
                    }
                }
                if arch.single_qubit_impl == SingleQubitImpl::SemiGlobal {
                    let cols: BTreeSet<usize> = rotations
                        .iter()
                        .map(|r| (r.sites[0] % compiled.topology.cols) & 1)
                        .collect();
                    if cols.len() > 1 {
                        report("semi-global drive spans both column parities".into());
                    }
                }
            }
        }
    }
    out
}
