//! Rectangular dot grids with degree-dependent diagonal couplers.

use serde::{Deserialize, Serialize};

use crate::design_space::Degree;

/// Row-major dot index.
pub type Site = usize;

/// Coupling graph of a `rows x cols` dot grid.
///
/// Degree 4 is the rectilinear grid, degree 6 adds the `(r, c)-(r+1, c+1)`
/// diagonal of every unit square and degree 8 adds both diagonals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "GridShape", into = "GridShape")]
pub struct Topology {
    pub rows: usize,
    pub cols: usize,
    pub degree: Degree,
    adj: Vec<Vec<Site>>,
}

#[derive(Serialize, Deserialize)]
struct GridShape {
    rows: usize,
    cols: usize,
    degree: Degree,
}

impl From<GridShape> for Topology {
    fn from(g: GridShape) -> Topology {
        Topology::grid(g.rows, g.cols, g.degree)
    }
}

impl From<Topology> for GridShape {
    fn from(t: Topology) -> GridShape {
        GridShape {
            rows: t.rows,
            cols: t.cols,
            degree: t.degree,
        }
    }
}

impl Topology {
    pub fn grid(rows: usize, cols: usize, degree: Degree) -> Topology {
        let mut t = Topology {
            rows,
            cols,
            degree,
            adj: Vec::new(),
        };
        t.rebuild();
        t
    }

    /// Grid with twice as many dots as qubits: `cols = ceil(sqrt(2n))`,
    /// `rows = ceil(2n / cols)`.
    pub fn for_qubits(n_qubits: usize, degree: Degree) -> Topology {
        let dots = (2 * n_qubits).max(2);
        let mut cols = (dots as f64).sqrt().ceil() as usize;
        while cols * cols < dots {
            cols += 1;
        }
        while cols > 1 && (cols - 1) * (cols - 1) >= dots {
            cols -= 1;
        }
        let rows = dots.div_ceil(cols);
        Topology::grid(rows, cols, degree)
    }

    fn rebuild(&mut self) {
        let mut adj = vec![Vec::new(); self.rows * self.cols];
        let (rows, cols) = (self.rows as isize, self.cols as isize);
        let mut offsets: Vec<(isize, isize)> = vec![(-1, 0), (1, 0), (0, -1), (0, 1)];
        match self.degree {
            Degree::Four => {}
            Degree::Six => offsets.extend([(-1, -1), (1, 1)]),
            Degree::Eight => offsets.extend([(-1, -1), (1, 1), (-1, 1), (1, -1)]),
        }
        for r in 0..rows {
            for c in 0..cols {
                let s = (r * cols + c) as usize;
                for &(dr, dc) in &offsets {
                    let (nr, nc) = (r + dr, c + dc);
                    if nr >= 0 && nr < rows && nc >= 0 && nc < cols {
                        adj[s].push((nr * cols + nc) as usize);
                    }
                }
                adj[s].sort_unstable();
            }
        }
        self.adj = adj;
    }

    pub fn num_sites(&self) -> usize {
        self.rows * self.cols
    }

    pub fn site(&self, row: usize, col: usize) -> Site {
        row * self.cols + col
    }

    pub fn coords(&self, s: Site) -> (usize, usize) {
        (s / self.cols, s % self.cols)
    }

    /// Checkerboard color: true for `(row + col)` even.
    pub fn is_even(&self, s: Site) -> bool {
        let (r, c) = self.coords(s);
        (r + c) % 2 == 0
    }

    pub fn neighbors(&self, s: Site) -> &[Site] {
        &self.adj[s]
    }

    pub fn adjacent(&self, a: Site, b: Site) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Undirected coupler list with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(Site, Site)> {
        let mut out = Vec::new();
        for (a, ns) in self.adj.iter().enumerate() {
            out.extend(ns.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    /// Same-color diagonal neighbours, the moves of the shuttle-based SWAP
    /// router.
    pub fn diagonal_neighbors(&self, s: Site) -> Vec<Site> {
        let (r, c) = self.coords(s);
        let mut out = Vec::new();
        for (dr, dc) in [(-1isize, -1isize), (-1, 1), (1, -1), (1, 1)] {
            let (nr, nc) = (r as isize + dr, c as isize + dc);
            if nr >= 0 && nr < self.rows as isize && nc >= 0 && nc < self.cols as isize {
                out.push(self.site(nr as usize, nc as usize));
            }
        }
        out.sort_unstable();
        out
    }

    /// The two rectilinear corners shared by diagonal sites `a` and `b`,
    /// in index order.
    pub fn shared_corners(&self, a: Site, b: Site) -> [Site; 2] {
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        let mut out = [self.site(ra, cb), self.site(rb, ca)];
        out.sort_unstable();
        out
    }

    /// Number of couplers joining a site of `a` to a site of `b`.
    pub fn links_between(&self, a: &[Site], b: &[Site]) -> usize {
        a.iter()
            .flat_map(|&x| b.iter().map(move |&y| (x, y)))
            .filter(|&(x, y)| x != y && self.adjacent(x, y))
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let t = Topology::for_qubits(8, Degree::Four);
        assert_eq!((t.rows, t.cols), (4, 4));
        let t = Topology::for_qubits(2, Degree::Four);
        assert_eq!((t.rows, t.cols), (2, 2));
        let t = Topology::for_qubits(1, Degree::Four);
        assert_eq!((t.rows, t.cols), (1, 2));
        let t = Topology::for_qubits(5, Degree::Four);
        assert_eq!((t.rows, t.cols), (3, 4));
        for n in 1..40 {
            let t = Topology::for_qubits(n, Degree::Four);
            assert!(t.num_sites() >= 2 * n);
        }
    }

    #[test]
    fn degree_counts_edges() {
        let t4 = Topology::grid(3, 3, Degree::Four);
        let t6 = Topology::grid(3, 3, Degree::Six);
        let t8 = Topology::grid(3, 3, Degree::Eight);
        assert_eq!(t4.edges().len(), 12);
        assert_eq!(t6.edges().len(), 16);
        assert_eq!(t8.edges().len(), 20);
        assert!(t6.adjacent(0, 4));
        assert!(!t6.adjacent(1, 3));
        assert!(t8.adjacent(1, 3));
        assert_eq!(t4.neighbors(4), &[1, 3, 5, 7]);
    }

    #[test]
    fn link_counts() {
        // two vertical pairs side by side in a 2x2 block
        let t4 = Topology::grid(2, 2, Degree::Four);
        assert_eq!(t4.links_between(&[0, 2], &[1, 3]), 2);
        let t6 = Topology::grid(2, 2, Degree::Six);
        assert_eq!(t6.links_between(&[0, 2], &[1, 3]), 3);
        let t8 = Topology::grid(2, 2, Degree::Eight);
        assert_eq!(t8.links_between(&[0, 2], &[1, 3]), 4);
    }

    #[test]
    fn diagonal_geometry() {
        let t = Topology::grid(3, 3, Degree::Four);
        assert_eq!(t.diagonal_neighbors(4), vec![0, 2, 6, 8]);
        assert_eq!(t.shared_corners(4, 8), [5, 7]);
    }
}
