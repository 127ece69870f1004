//! Lowering of logical circuits onto a spin-qubit architecture.
//!
//! `compile` places qubits on a checkerboard, routes every two-qubit gate
//! with the architecture's router, lowers Z rotations, and schedules the
//! resulting op stream into cycles that respect the parallelization
//! variables. [`verify`] and [`validate_constraints`] re-check the result
//! along independent code paths.

mod placement;
mod route;
mod schedule;
mod topology;
mod validate;
mod verify;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, GateKind, TqgFlavor};
use crate::design_space::Architecture;
use crate::esp::NoiseConfig;

pub use placement::Placement;
pub use route::replace_with_swap;
pub use schedule::{
    cap_limit, classes_may_coreside, schedule, stream_dag, CycleLimits, ANGLE_TOLERANCE,
};
pub use topology::{Site, Topology};
pub use validate::{validate_constraints, ConstraintViolation};
pub use verify::{verify, VerifyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("routing deadlock at gate {gate}: {message}")]
    RoutingDeadlock { gate: usize, message: String },
    #[error("gate {gate}: no free dot for a shuttle-based Z next to dot {site}")]
    ZShuttleBlocked { gate: usize, site: Site },
    #[error("gate {gate} cannot appear in a logical circuit")]
    InvalidGate { gate: usize },
}

/// Why an op was emitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpRole {
    /// Direct realization of a logical gate.
    Logical,
    /// One of the two shuttles realizing a shuttle-based Z rotation.
    ZShuttle,
    /// Movement that changes where qubits sit.
    Routing,
    /// Temporary approach shuttle around a two-qubit gate.
    Interaction,
}

/// An op bound to dots. Shuttles list `[from, to]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacedOp {
    pub kind: GateKind,
    pub sites: Vec<Site>,
    pub qubits: Vec<usize>,
    pub angle: Option<f64>,
    pub flavor: Option<TqgFlavor>,
    /// Index of the logical gate this op belongs to.
    pub origin: usize,
    pub role: OpRole,
}

impl PlacedOp {
    fn describe(&self) -> String {
        let name = match (self.kind, self.flavor) {
            (GateKind::Tqg, Some(TqgFlavor::Cx)) => "cx",
            (k, _) => k.mnemonic(),
        };
        let angle = self.angle.map(|a| format!("({a})")).unwrap_or_default();
        let body = if self.kind == GateKind::Shuttle {
            format!("q{} {}->{}", self.qubits[0], self.sites[0], self.sites[1])
        } else {
            let ops: Vec<String> = self
                .qubits
                .iter()
                .zip(&self.sites)
                .map(|(q, s)| format!("q{q}@{s}"))
                .collect();
            ops.join(",")
        };
        let tag = match self.role {
            OpRole::Logical => "",
            OpRole::ZShuttle => " [z]",
            OpRole::Routing => " [route]",
            OpRole::Interaction => " [approach]",
        };
        format!("{name}{angle} {body}{tag}")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileStats {
    pub logical_gates: usize,
    pub ops: usize,
    pub shuttles: usize,
    pub native_swaps: usize,
    pub routing_ops: usize,
    pub cycles: usize,
    /// Longest dependency chain of the logical circuit.
    pub logical_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompiledCircuit {
    pub name: String,
    pub n_qubits: usize,
    pub topology: Topology,
    /// Dot of each logical qubit before the first cycle.
    pub initial_sites: Vec<Site>,
    pub final_sites: Vec<Site>,
    pub cycles: Vec<Vec<PlacedOp>>,
    pub stats: CompileStats,
}

impl CompiledCircuit {
    pub fn ops(&self) -> impl Iterator<Item = &PlacedOp> {
        self.cycles.iter().flatten()
    }

    pub fn depth(&self) -> usize {
        self.cycles.len()
    }

    /// Human-readable cycle listing.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "# {} on {}x{} degree {}, {} qubits, {} cycles\n",
            self.name,
            self.topology.rows,
            self.topology.cols,
            self.topology.degree.value(),
            self.n_qubits,
            self.cycles.len()
        );
        let _ = writeln!(out, "# initial {:?}", self.initial_sites);
        for (c, ops) in self.cycles.iter().enumerate() {
            let parts: Vec<String> = ops.iter().map(PlacedOp::describe).collect();
            let _ = writeln!(out, "{c}: {}", parts.join(" | "));
        }
        out
    }
}

/// Compiles `circuit` for `arch`. The noise configuration only influences
/// SWAP replacement in the snake router.
pub fn compile(
    circuit: &Circuit,
    arch: &Architecture,
    noise: &NoiseConfig,
) -> Result<CompiledCircuit, CompileError> {
    let topo = Topology::for_qubits(circuit.n_qubits, arch.degree);
    let placement = Placement::checkerboard(circuit.n_qubits, &topo);
    let initial_sites = placement.sites().to_vec();
    let mut router = route::Router::new(&topo, arch, noise, placement);
    for (i, gate) in circuit.gates.iter().enumerate() {
        router.lower(i, gate)?;
    }
    let final_sites = router.placement.sites().to_vec();
    let ops = std::mem::take(&mut router.ops);
    let order = schedule(&ops, arch, circuit.n_qubits, &topo);
    let stats = CompileStats {
        logical_gates: circuit.gates.len(),
        ops: ops.len(),
        shuttles: ops.iter().filter(|o| o.kind == GateKind::Shuttle).count(),
        native_swaps: ops
            .iter()
            .filter(|o| o.kind == GateKind::Swap && o.role == OpRole::Routing)
            .count(),
        routing_ops: ops
            .iter()
            .filter(|o| matches!(o.role, OpRole::Routing | OpRole::Interaction))
            .count(),
        cycles: order.len(),
        logical_depth: circuit.dag().longest_path(),
    };
    let mut slots: Vec<Option<PlacedOp>> = ops.into_iter().map(Some).collect();
    let cycles = order
        .into_iter()
        .map(|idx| {
            idx.into_iter()
                .map(|i| slots[i].take().expect("op scheduled once"))
                .collect()
        })
        .collect();
    Ok(CompiledCircuit {
        name: circuit.name.clone(),
        n_qubits: circuit.n_qubits,
        topology: topo,
        initial_sites,
        final_sites,
        cycles,
        stats,
    })
}
