//! Replay of a compiled circuit against its source.

use thiserror::Error;

use super::{CompiledCircuit, OpRole, PlacedOp};
use crate::circuit::{Circuit, GateKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cycle {cycle}: {message}")]
pub struct VerifyError {
    /// Cycle of the offending op, or the cycle count for whole-circuit
    /// checks.
    pub cycle: usize,
    pub message: String,
}

/// Checks that `compiled` realizes `circuit`: every op acts on coupled dots
/// holding the qubits it names, shuttles land on empty coupled dots, every
/// logical gate appears once with its operands in order, and dependent
/// gates keep their order.
pub fn verify(circuit: &Circuit, compiled: &CompiledCircuit) -> Result<(), VerifyError> {
    let topo = &compiled.topology;
    let end = compiled.cycles.len();
    let fail = |cycle: usize, message: String| Err(VerifyError { cycle, message });
    if compiled.n_qubits != circuit.n_qubits || compiled.initial_sites.len() != circuit.n_qubits {
        return fail(0, "qubit count mismatch".into());
    }
    let mut holder: Vec<Option<usize>> = vec![None; topo.num_sites()];
    for (q, &s) in compiled.initial_sites.iter().enumerate() {
        if s >= holder.len() || holder[s].is_some() {
            return fail(0, format!("bad initial dot for q{q}"));
        }
        holder[s] = Some(q);
    }

    // cycle span of each logical gate's realization
    let mut span: Vec<Option<(usize, usize)>> = vec![None; circuit.gates.len()];
    let mut realizations: Vec<Vec<&PlacedOp>> = vec![Vec::new(); circuit.gates.len()];

    for (cycle, ops) in compiled.cycles.iter().enumerate() {
        for op in ops {
            let Some(gate) = circuit.gates.get(op.origin) else {
                return fail(cycle, format!("op refers to missing gate {}", op.origin));
            };
            let n_sites = if op.kind == GateKind::Shuttle {
                2
            } else {
                op.kind.arity()
            };
            if op.sites.len() != n_sites || op.qubits.len() != op.kind.arity() {
                return fail(cycle, format!("malformed op {op:?}"));
            }
            match op.kind {
                GateKind::Shuttle => {
                    let (from, to) = (op.sites[0], op.sites[1]);
                    if !topo.adjacent(from, to) {
                        return fail(
                            cycle,
                            format!("shuttle {from}->{to} between uncoupled dots"),
                        );
                    }
                    if holder[from] != Some(op.qubits[0]) {
                        return fail(
                            cycle,
                            format!("shuttle source {from} does not hold q{}", op.qubits[0]),
                        );
                    }
                    if holder[to].is_some() {
                        return fail(cycle, format!("shuttle onto occupied dot {to}"));
                    }
                    holder[to] = holder[from].take();
                }
                _ => {
                    for (q, s) in op.qubits.iter().zip(&op.sites) {
                        if holder[*s] != Some(*q) {
                            return fail(cycle, format!("dot {s} does not hold q{q}"));
                        }
                    }
                    if op.kind.arity() == 2 && !topo.adjacent(op.sites[0], op.sites[1]) {
                        return fail(
                            cycle,
                            format!("{} on uncoupled dots {:?}", op.kind.mnemonic(), op.sites),
                        );
                    }
                    if op.kind == GateKind::Swap && op.role == OpRole::Routing {
                        holder.swap(op.sites[0], op.sites[1]);
                    }
                }
            }
            if matches!(op.role, OpRole::Logical | OpRole::ZShuttle) {
                let matches_gate = match op.role {
                    OpRole::Logical => {
                        op.kind == gate.kind
                            && op.qubits == gate.qubits
                            && op.angle == gate.angle
                            && op.flavor == gate.flavor
                    }
                    _ => {
                        gate.kind == GateKind::Rz
                            && op.qubits == gate.qubits
                            && op.angle == gate.angle
                    }
                };
                if !matches_gate {
                    return fail(
                        cycle,
                        format!("op {op:?} does not realize gate {}: {gate}", op.origin),
                    );
                }
                realizations[op.origin].push(op);
                let s = span[op.origin].get_or_insert((cycle, cycle));
                s.1 = cycle;
            }
        }
    }

    for (i, gate) in circuit.gates.iter().enumerate() {
        let ops = &realizations[i];
        let ok = match ops.as_slice() {
            [op] => op.role == OpRole::Logical,
            [out, back] => {
                out.role == OpRole::ZShuttle
                    && back.role == OpRole::ZShuttle
                    && out.kind == GateKind::Shuttle
                    && out.sites[0] == back.sites[1]
                    && out.sites[1] == back.sites[0]
            }
            _ => false,
        };
        if !ok {
            return fail(
                end,
                format!("gate {i} ({gate}) realized by {} ops", ops.len()),
            );
        }
    }
    for &(a, b) in circuit.dag().edges() {
        let (_, a_end) = span[a].expect("realized");
        let (b_start, _) = span[b].expect("realized");
        if a_end >= b_start {
            return fail(
                b_start,
                format!("gate {b} runs before its dependency {a} completes"),
            );
        }
    }
    let mut final_sites = vec![usize::MAX; circuit.n_qubits];
    for (s, q) in holder.iter().enumerate() {
        if let Some(q) = q {
            final_sites[*q] = s;
        }
    }
    if final_sites != compiled.final_sites {
        return fail(end, "final placement differs from the replay".into());
    }
    Ok(())
}
