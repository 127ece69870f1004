use std::collections::HashMap;
use std::hash::Hash;

/// Dependency DAG over nodes in program order.
///
/// An edge `i -> j` exists when `i` and `j` share a resource (an operand
/// qubit, or for compiled streams also a dot site) and no node between
/// them touches that resource. Edges always point forward.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dag {
    n: usize,
    edges: Vec<(usize, usize)>,
    preds: Vec<Vec<usize>>,
}

impl Dag {
    pub fn from_operands<'a, I>(operands: I) -> Dag
    where
        I: IntoIterator<Item = &'a [usize]>,
    {
        Dag::from_resources(operands.into_iter().map(|ops| ops.iter().copied()))
    }

    /// Builds the DAG from per-node resource lists.
    pub fn from_resources<R, I, J>(nodes: I) -> Dag
    where
        R: Eq + Hash,
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = R>,
    {
        let mut last: HashMap<R, usize> = HashMap::new();
        let mut preds: Vec<Vec<usize>> = Vec::new();
        let mut edges = Vec::new();
        for (j, resources) in nodes.into_iter().enumerate() {
            let mut p: Vec<usize> = Vec::new();
            for r in resources {
                if let Some(i) = last.insert(r, j) {
                    if i != j && !p.contains(&i) {
                        p.push(i);
                    }
                }
            }
            p.sort_unstable();
            edges.extend(p.iter().map(|&i| (i, j)));
            preds.push(p);
        }
        edges.sort_unstable();
        Dag {
            n: preds.len(),
            edges,
            preds,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn predecessors(&self, node: usize) -> &[usize] {
        &self.preds[node]
    }

    /// Number of nodes on the longest dependency chain.
    pub fn longest_path(&self) -> usize {
        let mut depth = vec![0usize; self.n];
        for j in 0..self.n {
            depth[j] = 1 + self.preds[j].iter().map(|&i| depth[i]).max().unwrap_or(0);
        }
        depth.into_iter().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjoint_operands_have_no_edges() {
        let dag = Dag::from_operands([&[0usize][..], &[1usize][..]]);
        assert!(dag.edges().is_empty());
        assert_eq!(dag.longest_path(), 1);
    }

    #[test]
    fn chain() {
        let dag = Dag::from_operands([&[0usize][..], &[0usize, 1][..], &[1usize][..]]);
        assert_eq!(dag.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(dag.longest_path(), 3);
    }

    #[test]
    fn shared_pair_gives_single_edge() {
        let dag = Dag::from_operands([&[0usize, 1][..], &[1usize, 0][..]]);
        assert_eq!(dag.edges(), &[(0, 1)]);
    }
}
