//! ASAP list scheduling under the architecture's parallelization limits.

use serde::{Deserialize, Serialize};

use super::topology::{Site, Topology};
use super::PlacedOp;
use crate::circuit::{Dag, GateClass, GateKind};
use crate::design_space::{Architecture, Cap, SingleQubitImpl};

/// Angles closer than this count as the same global drive.
pub const ANGLE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Resource {
    Qubit(usize),
    Site(Site),
}

/// Dependency DAG of a routed op stream over qubits and dots.
pub fn stream_dag(ops: &[PlacedOp]) -> Dag {
    Dag::from_resources(ops.iter().map(|op| {
        op.qubits
            .iter()
            .map(|&q| Resource::Qubit(q))
            .chain(op.sites.iter().map(|&s| Resource::Site(s)))
            .collect::<Vec<_>>()
    }))
}

/// Per-cycle op caps derived from the `*D` variables. `None` means
/// unlimited.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleLimits {
    pub xy: Option<usize>,
    pub z: Option<usize>,
    pub tqg: Option<usize>,
    pub shuttle: Option<usize>,
}

impl CycleLimits {
    pub fn new(arch: &Architecture, n_qubits: usize) -> CycleLimits {
        CycleLimits {
            xy: cap_limit(arch.xy_d, n_qubits),
            z: cap_limit(arch.z_d, n_qubits),
            tqg: cap_limit(arch.tqg_d, n_qubits / 2),
            shuttle: cap_limit(arch.s_d, n_qubits),
        }
    }

    pub fn of(&self, class: GateClass) -> Option<usize> {
        match class {
            GateClass::Xy => self.xy,
            GateClass::Z => self.z,
            GateClass::Tqg => self.tqg,
            GateClass::Shuttle => self.shuttle,
        }
    }
}

/// `max(1, floor(pct * base / 100))`, or `None` for N/A.
pub fn cap_limit(cap: Cap, base: usize) -> Option<usize> {
    cap.percent().map(|p| (p as usize * base / 100).max(1))
}

/// Whether ops of the given (non-shuttle) classes may share a cycle.
pub fn classes_may_coreside(arch: &Architecture, xy: bool, z: bool, tqg: bool) -> bool {
    match (xy, z, tqg) {
        (true, true, true) => arch.xy_z_tqg || (arch.xy_z && arch.xy_tqg && arch.z_tqg),
        (true, true, false) => arch.xy_z || arch.xy_z_tqg,
        (true, false, true) => arch.xy_tqg || arch.xy_z_tqg,
        (false, true, true) => arch.z_tqg || arch.xy_z_tqg,
        _ => true,
    }
}

#[derive(Default)]
struct Slot {
    total: usize,
    counts: [usize; 4],
    sites: Vec<Site>,
    drive: Option<(GateKind, f64)>,
    parity: Option<usize>,
}

fn class_index(c: GateClass) -> usize {
    match c {
        GateClass::Xy => 0,
        GateClass::Z => 1,
        GateClass::Tqg => 2,
        GateClass::Shuttle => 3,
    }
}

struct Ctx<'a> {
    arch: &'a Architecture,
    limits: CycleLimits,
    topo: &'a Topology,
}

impl Ctx<'_> {
    fn fits(&self, slot: &Slot, op: &PlacedOp) -> bool {
        let sqi = self.arch.single_qubit_impl;
        if sqi == SingleQubitImpl::Sequential && slot.total > 0 {
            return false;
        }
        if op.sites.iter().any(|s| slot.sites.contains(s)) {
            return false;
        }
        let class = op.kind.class();
        let ci = class_index(class);
        if let Some(limit) = self.limits.of(class) {
            if slot.counts[ci] >= limit {
                return false;
            }
        }
        if class != GateClass::Shuttle {
            let mut present = [slot.counts[0] > 0, slot.counts[1] > 0, slot.counts[2] > 0];
            present[ci] = true;
            if !classes_may_coreside(self.arch, present[0], present[1], present[2]) {
                return false;
            }
        }
        if op.kind.is_rotation()
            && matches!(sqi, SingleQubitImpl::Global | SingleQubitImpl::SemiGlobal)
        {
            let angle = op.angle.unwrap_or(0.0);
            if let Some((kind, a)) = slot.drive {
                if kind != op.kind || (a - angle).abs() > ANGLE_TOLERANCE {
                    return false;
                }
            }
            if sqi == SingleQubitImpl::SemiGlobal {
                let parity = self.topo.coords(op.sites[0]).1 % 2;
                if slot.parity.is_some_and(|p| p != parity) {
                    return false;
                }
            }
        }
        true
    }

    fn place(&self, slot: &mut Slot, op: &PlacedOp) {
        slot.total += 1;
        slot.counts[class_index(op.kind.class())] += 1;
        slot.sites.extend(&op.sites);
        if op.kind.is_rotation() {
            slot.drive.get_or_insert((op.kind, op.angle.unwrap_or(0.0)));
            slot.parity
                .get_or_insert(self.topo.coords(op.sites[0]).1 % 2);
        }
    }
}

/// Assigns every op to the earliest cycle after all its predecessors in
/// which it fits. Returns op indices per cycle, in stream order.
pub fn schedule(
    ops: &[PlacedOp],
    arch: &Architecture,
    n_qubits: usize,
    topo: &Topology,
) -> Vec<Vec<usize>> {
    let dag = stream_dag(ops);
    let ctx = Ctx {
        arch,
        limits: CycleLimits::new(arch, n_qubits),
        topo,
    };
    let mut slots: Vec<Slot> = Vec::new();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut cycle_of = vec![0usize; ops.len()];
    for (j, op) in ops.iter().enumerate() {
        let ready = dag
            .predecessors(j)
            .iter()
            .map(|&p| cycle_of[p] + 1)
            .max()
            .unwrap_or(0);
        let mut c = ready;
        loop {
            if c == slots.len() {
                slots.push(Slot::default());
                cycles.push(Vec::new());
            }
            if ctx.fits(&slots[c], op) {
                break;
            }
            c += 1;
        }
        ctx.place(&mut slots[c], op);
        cycles[c].push(j);
        cycle_of[j] = c;
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_limits() {
        let mut a = Architecture::fully_parallel();
        a.xy_d = Cap::new(25).unwrap();
        a.tqg_d = Cap::new(1).unwrap();
        a.s_d = Cap::new(-1).unwrap();
        let l = CycleLimits::new(&a, 8);
        assert_eq!(l.xy, Some(2));
        assert_eq!(l.tqg, Some(1));
        assert_eq!(l.shuttle, None);
        assert_eq!(cap_limit(Cap::new(50).unwrap(), 1), Some(1));
        assert_eq!(cap_limit(Cap::new(100).unwrap(), 0), Some(1));
    }

    #[test]
    fn coresidency() {
        let mut a = Architecture::fully_parallel();
        a.xy_z = false;
        a.xy_tqg = false;
        a.z_tqg = false;
        a.xy_z_tqg = false;
        assert!(!classes_may_coreside(&a, true, true, false));
        assert!(classes_may_coreside(&a, true, false, false));
        a.xy_z_tqg = true;
        assert!(classes_may_coreside(&a, true, true, true));
        assert!(classes_may_coreside(&a, false, true, true));
        a.xy_z_tqg = false;
        a.xy_z = true;
        a.xy_tqg = true;
        assert!(!classes_may_coreside(&a, true, true, true));
        a.z_tqg = true;
        assert!(classes_may_coreside(&a, true, true, true));
    }
}
