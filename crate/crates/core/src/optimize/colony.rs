use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{ColonyParams, Evaluator, OptimizeError, Policy};
use crate::design_space::{ArchId, Architecture, DesignSpace, NUM_VARIABLES};

pub const MIN_PH: f64 = 1.0;
pub const MAX_PH: f64 = 6.0;
/// Iterations averaged into the reference gain.
const GAIN_WINDOW: usize = 3;

/// Pheromone laid on every edge of an ant's path, given its gain over the
/// best value seen before the iteration and the average of the best gains
/// of the previous iterations.
pub fn pheromone_deposit(delta: f64, delta_avg: f64) -> f64 {
    if delta < 0.0 {
        MIN_PH
    } else if delta_avg <= 0.0 {
        MAX_PH
    } else {
        (MIN_PH + (MAX_PH - MIN_PH) * delta / delta_avg).min(MAX_PH)
    }
}

/// Prefix trie over the variable values of a set of architectures, in
/// declared variable order. Node 0 is the root; every other node owns the
/// edge from its parent. Children of a node are contiguous and sorted by
/// value index, and leaves are the architectures.
pub struct ArchTree {
    first_child: Vec<u32>,
    n_children: Vec<u8>,
    /// For leaves, the architecture; for inner nodes, the first architecture
    /// below them.
    arch: Vec<ArchId>,
    depth: Vec<u8>,
}

impl ArchTree {
    pub fn from_space(space: &DesignSpace) -> Self {
        Self::from_ids(space.valid_ids())
    }

    /// `ids` must be sorted, which orders them lexicographically by value
    /// index.
    pub fn from_ids(ids: &[ArchId]) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        let codes: Vec<[u8; NUM_VARIABLES]> = ids
            .iter()
            .map(|&id| Architecture::from_id(id).expect("valid id").coordinates())
            .collect();
        let mut tree = ArchTree {
            first_child: vec![0],
            n_children: vec![0],
            arch: vec![ids.first().copied().unwrap_or(ArchId(0))],
            depth: vec![0],
        };
        // breadth first so siblings get consecutive numbers
        let mut queue = VecDeque::from([(0usize, 0usize, ids.len())]);
        while let Some((node, lo, hi)) = queue.pop_front() {
            let d = tree.depth[node] as usize;
            if d == NUM_VARIABLES || lo == hi {
                continue;
            }
            tree.first_child[node] = tree.arch.len() as u32;
            let mut start = lo;
            while start < hi {
                let mut end = start + 1;
                while end < hi && codes[end][d] == codes[start][d] {
                    end += 1;
                }
                tree.first_child.push(0);
                tree.n_children.push(0);
                tree.arch.push(ids[start]);
                tree.depth.push(d as u8 + 1);
                queue.push_back((tree.arch.len() - 1, start, end));
                tree.n_children[node] += 1;
                start = end;
            }
        }
        tree
    }

    pub fn num_nodes(&self) -> usize {
        self.arch.len()
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.depth[node] as usize == NUM_VARIABLES
    }

    pub fn children(&self, node: usize) -> std::ops::Range<usize> {
        let f = self.first_child[node] as usize;
        f..f + self.n_children[node] as usize
    }

    pub fn leaves(&self) -> impl Iterator<Item = ArchId> + '_ {
        (0..self.num_nodes())
            .filter(|&n| self.is_leaf(n))
            .map(|n| self.arch[n])
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().count()
    }

    /// Architecture of a leaf.
    pub fn arch_of(&self, node: usize) -> Option<ArchId> {
        self.is_leaf(node).then(|| self.arch[node])
    }
}

/// Pheromone state over an [`ArchTree`], one value per non-root node.
pub struct PheromoneTrail {
    pub tree: ArchTree,
    pub level: Vec<f64>,
}

impl PheromoneTrail {
    pub fn new(tree: ArchTree) -> Self {
        let level = vec![MIN_PH; tree.num_nodes()];
        PheromoneTrail { tree, level }
    }

    /// Walks root to leaf and returns the visited nodes after the root.
    pub fn walk(&self, p_exploit: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut path = Vec::with_capacity(NUM_VARIABLES);
        let mut node = 0;
        while !self.tree.is_leaf(node) {
            let kids = self.tree.children(node);
            node = if kids.len() == 1 {
                kids.start
            } else if rng.random::<f64>() < p_exploit {
                // first maximum wins ties
                kids.clone().fold(kids.start, |best, k| {
                    if self.level[k] > self.level[best] {
                        k
                    } else {
                        best
                    }
                })
            } else {
                let total: f64 = kids.clone().map(|k| self.level[k]).sum();
                let mut x = rng.random::<f64>() * total;
                let mut pick = kids.end - 1;
                for k in kids.clone() {
                    if x < self.level[k] {
                        pick = k;
                        break;
                    }
                    x -= self.level[k];
                }
                pick
            };
            path.push(node);
        }
        path
    }

    pub fn deposit(&mut self, path: &[usize], amount: f64) {
        for &n in path {
            self.level[n] += amount;
        }
    }

    pub fn decay(&mut self, rate: f64) {
        for v in &mut self.level {
            *v *= 1.0 - rate;
        }
    }
}

pub(super) struct Colony {
    params: ColonyParams,
    trail: PheromoneTrail,
    /// Best gain of each past iteration, most recent last.
    gains: Vec<f64>,
}

impl Colony {
    pub(super) fn new(params: ColonyParams, space: &DesignSpace) -> Self {
        Colony {
            params,
            trail: PheromoneTrail::new(ArchTree::from_space(space)),
            gains: Vec::new(),
        }
    }
}

impl Policy for Colony {
    fn iterate(
        &mut self,
        _iteration: u64,
        _space: &DesignSpace,
        eval: &mut Evaluator<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Option<Vec<ArchId>>, OptimizeError> {
        let paths: Vec<Vec<usize>> = (0..self.params.ants)
            .map(|_| self.trail.walk(self.params.p_exploit, rng))
            .collect();
        let ids: Vec<ArchId> = paths
            .iter()
            .map(|p| {
                self.trail
                    .tree
                    .arch_of(*p.last().expect("nonempty path"))
                    .expect("leaf")
            })
            .collect();
        let before = eval.best().map(|b| b.score);
        let scores: Vec<f64> = eval.evaluate_batch(&ids).iter().map(|e| e.score).collect();
        let reference =
            before.unwrap_or_else(|| scores.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        let recent = &self.gains[self.gains.len().saturating_sub(GAIN_WINDOW)..];
        let avg = recent.iter().sum::<f64>() / GAIN_WINDOW as f64;
        let mut best_gain = f64::NEG_INFINITY;
        for (path, score) in paths.iter().zip(&scores) {
            let gain = score - reference;
            best_gain = best_gain.max(gain);
            self.trail.deposit(path, pheromone_deposit(gain, avg));
        }
        self.trail.decay(self.params.decay);
        self.gains.push(best_gain);
        Ok(Some(ids))
    }
}
