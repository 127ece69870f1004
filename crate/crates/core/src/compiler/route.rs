//! Routing of logical gates onto the dot grid.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use super::placement::Placement;
use super::topology::{Site, Topology};
use super::{CompileError, OpRole, PlacedOp};
use crate::circuit::{Gate, GateKind};
use crate::design_space::{Architecture, Router as RouterKind, ZRotImpl};
use crate::esp::NoiseConfig;

/// Step cost of entering an occupied dot in the snake path search.
const OCCUPIED_STEP_COST: u32 = 3;

/// Whether a run of `shuttles` shuttles should be replaced by one native
/// SWAP.
pub fn replace_with_swap(shuttles: usize, noise: &NoiseConfig) -> bool {
    noise.f_shuttle.powi(shuttles as i32) < noise.f_swap
}

pub(crate) struct Router<'a> {
    topo: &'a Topology,
    arch: &'a Architecture,
    noise: &'a NoiseConfig,
    pub placement: Placement,
    pub ops: Vec<PlacedOp>,
    gate: usize,
    moves: usize,
    budget: usize,
}

impl<'a> Router<'a> {
    pub fn new(
        topo: &'a Topology,
        arch: &'a Architecture,
        noise: &'a NoiseConfig,
        placement: Placement,
    ) -> Self {
        let budget = 8 * placement.n_qubits().max(1);
        Router {
            topo,
            arch,
            noise,
            placement,
            ops: Vec::new(),
            gate: 0,
            moves: 0,
            budget,
        }
    }

    pub fn lower(&mut self, index: usize, gate: &Gate) -> Result<(), CompileError> {
        self.gate = index;
        self.moves = 0;
        match gate.kind {
            GateKind::Rz if self.arch.z_rot_impl == ZRotImpl::ShuttleBased => self.z_shuttle(gate),
            GateKind::Rx | GateKind::Ry | GateKind::Rz => {
                self.emit_logical(gate);
                Ok(())
            }
            GateKind::Tqg | GateKind::Swap => {
                let (a, b) = (gate.qubits[0], gate.qubits[1]);
                let back = match self.arch.router {
                    RouterKind::ShuttleBasedSwap => self.route_sbs(a, b)?,
                    RouterKind::Snake => {
                        self.route_snake(a, b)?;
                        None
                    }
                };
                self.emit_logical(gate);
                if let Some((from, to)) = back {
                    self.shuttle(from, to, OpRole::Interaction);
                }
                Ok(())
            }
            GateKind::Shuttle => Err(CompileError::InvalidGate { gate: index }),
        }
    }

    fn emit_logical(&mut self, gate: &Gate) {
        let sites = gate
            .qubits
            .iter()
            .map(|&q| self.placement.site(q))
            .collect();
        self.ops.push(PlacedOp {
            kind: gate.kind,
            sites,
            qubits: gate.qubits.clone(),
            angle: gate.angle,
            flavor: gate.flavor,
            origin: self.gate,
            role: OpRole::Logical,
        });
    }

    fn shuttle(&mut self, from: Site, to: Site, role: OpRole) {
        let q = self
            .placement
            .occupant(from)
            .expect("shuttle source occupied");
        self.placement.shuttle(from, to);
        self.moves += 1;
        self.ops.push(PlacedOp {
            kind: GateKind::Shuttle,
            sites: vec![from, to],
            qubits: vec![q],
            angle: None,
            flavor: None,
            origin: self.gate,
            role,
        });
    }

    fn native_swap(&mut self, a: Site, b: Site) {
        let qa = self.placement.occupant(a).expect("swap operand");
        let qb = self.placement.occupant(b).expect("swap operand");
        self.placement.exchange(a, b);
        self.moves += 1;
        self.ops.push(PlacedOp {
            kind: GateKind::Swap,
            sites: vec![a, b],
            qubits: vec![qa, qb],
            angle: None,
            flavor: None,
            origin: self.gate,
            role: OpRole::Routing,
        });
    }

    fn deadlock(&self, message: impl Into<String>) -> CompileError {
        CompileError::RoutingDeadlock {
            gate: self.gate,
            message: message.into(),
        }
    }

    fn check_budget(&self) -> Result<(), CompileError> {
        if self.moves > self.budget {
            Err(self.deadlock(format!("move budget of {} exhausted", self.budget)))
        } else {
            Ok(())
        }
    }

    /// Shuttle-based Z: out to an empty neighbour and back.
    fn z_shuttle(&mut self, gate: &Gate) -> Result<(), CompileError> {
        let q = gate.qubits[0];
        let s = self.placement.site(q);
        let (row, _) = self.topo.coords(s);
        let ns = self.topo.neighbors(s);
        let empty_horizontal = ns
            .iter()
            .copied()
            .find(|&n| self.topo.coords(n).0 == row && self.placement.is_empty(n));
        let target = match empty_horizontal
            .or_else(|| ns.iter().copied().find(|&n| self.placement.is_empty(n)))
        {
            Some(e) => e,
            None => {
                let freed = ns
                    .iter()
                    .find_map(|&y| self.displacement(y, &[s, y]).map(|m| (y, m)));
                let (y, moves) = freed.ok_or(CompileError::ZShuttleBlocked {
                    gate: self.gate,
                    site: s,
                })?;
                for (from, to) in moves {
                    self.shuttle(from, to, OpRole::Routing);
                }
                y
            }
        };
        for (from, to) in [(s, target), (target, s)] {
            self.placement.shuttle(from, to);
            self.ops.push(PlacedOp {
                kind: GateKind::Shuttle,
                sites: vec![from, to],
                qubits: vec![q],
                angle: gate.angle,
                flavor: None,
                origin: self.gate,
                role: OpRole::ZShuttle,
            });
        }
        Ok(())
    }

    /// Moves operand `a` along same-color diagonals until it couples to
    /// `b`. Returns the move that undoes the final approach shuttle, if one
    /// was needed.
    fn route_sbs(&mut self, a: usize, b: usize) -> Result<Option<(Site, Site)>, CompileError> {
        let sa = self.placement.site(a);
        let sb = self.placement.site(b);
        if self.topo.adjacent(sa, sb) {
            return Ok(None);
        }
        if self.topo.is_even(sa) != self.topo.is_even(sb) {
            return Err(self.deadlock("operands on different checkerboard colors"));
        }
        let path = self
            .diagonal_path(sa, sb)
            .ok_or_else(|| self.deadlock("no diagonal path between operands"))?;
        for &t in &path[1..path.len() - 1] {
            let u = self.placement.site(a);
            let [e, f] = self.topo.shared_corners(u, t);
            if !(self.placement.is_empty(e) && self.placement.is_empty(f)) {
                return Err(self.deadlock("checkerboard corner occupied"));
            }
            if self.placement.is_empty(t) {
                self.shuttle(u, e, OpRole::Routing);
                self.shuttle(e, t, OpRole::Routing);
            } else {
                self.shuttle(u, e, OpRole::Routing);
                self.shuttle(t, f, OpRole::Routing);
                self.shuttle(e, t, OpRole::Routing);
                self.shuttle(f, u, OpRole::Routing);
            }
            self.check_budget()?;
        }
        let u = self.placement.site(a);
        if self.topo.adjacent(u, sb) {
            return Ok(None);
        }
        let corner = self
            .topo
            .shared_corners(u, sb)
            .into_iter()
            .find(|&c| self.placement.is_empty(c))
            .ok_or_else(|| self.deadlock("no free dot next to the target"))?;
        self.shuttle(u, corner, OpRole::Interaction);
        Ok(Some((corner, u)))
    }

    fn diagonal_path(&self, from: Site, to: Site) -> Option<Vec<Site>> {
        let mut prev = vec![usize::MAX; self.topo.num_sites()];
        let mut queue = VecDeque::from([from]);
        prev[from] = from;
        while let Some(s) = queue.pop_front() {
            if s == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for n in self.topo.diagonal_neighbors(s) {
                if prev[n] == usize::MAX {
                    prev[n] = s;
                    queue.push_back(n);
                }
            }
        }
        None
    }

    /// Moves the cheaper operand along a shortest path until it couples to
    /// the other, displacing blockers on the way. A blocker that cannot be
    /// moved is avoided and the path replanned.
    fn route_snake(&mut self, a: usize, b: usize) -> Result<(), CompileError> {
        let mut avoid: Vec<Site> = Vec::new();
        'plan: loop {
            let (sa, sb) = (self.placement.site(a), self.placement.site(b));
            if self.topo.adjacent(sa, sb) {
                return Ok(());
            }
            let pa = self.snake_path(sa, sb, &avoid);
            let pb = self.snake_path(sb, sa, &avoid);
            let (mover, so, path) = match (pa, pb) {
                (Some((ca, pa)), Some((cb, pb))) => {
                    if cb < ca {
                        (b, sa, pb)
                    } else {
                        (a, sb, pa)
                    }
                }
                (Some((_, pa)), None) => (a, sb, pa),
                (None, Some((_, pb))) => (b, sa, pb),
                (None, None) => return Err(self.deadlock("operands cannot meet")),
            };
            for (i, &t) in path.iter().enumerate().skip(1) {
                let u = self.placement.site(mover);
                if self.placement.is_empty(t) {
                    self.shuttle(u, t, OpRole::Routing);
                } else {
                    let mut forbidden: Vec<Site> = path[i + 1..].to_vec();
                    forbidden.extend([u, so, t]);
                    // prefer dots off the remaining path, then any dot
                    let segment = self
                        .displacement(t, &forbidden)
                        .or_else(|| self.displacement(t, &[u, so, t]));
                    let use_swap = self.arch.swap_opt
                        && match &segment {
                            None => true,
                            Some(moves) => replace_with_swap(moves.len() + 1, self.noise),
                        };
                    if use_swap {
                        self.native_swap(u, t);
                    } else if let Some(moves) = segment {
                        for (from, to) in moves {
                            self.shuttle(from, to, OpRole::Routing);
                        }
                        self.shuttle(u, t, OpRole::Routing);
                    } else {
                        avoid.push(t);
                        continue 'plan;
                    }
                }
                self.check_budget()?;
            }
        }
    }

    /// Shuttles that clear dot `t` by pushing a chain of qubits towards the
    /// nearest empty dot outside `forbidden`.
    fn displacement(&self, t: Site, forbidden: &[Site]) -> Option<Vec<(Site, Site)>> {
        let mut prev = vec![usize::MAX; self.topo.num_sites()];
        prev[t] = t;
        let mut queue = VecDeque::from([t]);
        while let Some(s) = queue.pop_front() {
            for &v in self.topo.neighbors(s) {
                if prev[v] != usize::MAX || forbidden.contains(&v) {
                    continue;
                }
                prev[v] = s;
                if self.placement.is_empty(v) {
                    let mut moves = Vec::new();
                    let mut cur = v;
                    while cur != t {
                        moves.push((prev[cur], cur));
                        cur = prev[cur];
                    }
                    return Some(moves);
                }
                queue.push_back(v);
            }
        }
        None
    }

    /// Cheapest path from `from` to any dot coupled to `partner`, never
    /// entering `partner` or `avoid`. Returns the cost and the dots visited.
    fn snake_path(&self, from: Site, partner: Site, avoid: &[Site]) -> Option<(u32, Vec<Site>)> {
        let n = self.topo.num_sites();
        let mut dist = vec![u32::MAX; n];
        let mut prev = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[from] = 0;
        heap.push(Reverse((0u32, from)));
        while let Some(Reverse((d, s))) = heap.pop() {
            if d > dist[s] {
                continue;
            }
            if self.topo.adjacent(s, partner) {
                let mut path = vec![s];
                let mut cur = s;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some((d, path));
            }
            for &v in self.topo.neighbors(s) {
                if v == partner || avoid.contains(&v) {
                    continue;
                }
                let step = if self.placement.is_empty(v) {
                    1
                } else {
                    OCCUPIED_STEP_COST
                };
                let nd = d + step;
                if nd < dist[v] {
                    dist[v] = nd;
                    prev[v] = s;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        None
    }
}
