use serde::{Deserialize, Serialize};

use super::topology::{Site, Topology};

/// Bidirectional map between logical qubits and dots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    site_of: Vec<Site>,
    occupant: Vec<Option<usize>>,
}

impl Placement {
    /// Qubit `i` on the `i`-th even-colored dot in row-major order.
    pub fn checkerboard(n_qubits: usize, topo: &Topology) -> Placement {
        let sites: Vec<Site> = (0..topo.num_sites())
            .filter(|&s| topo.is_even(s))
            .take(n_qubits)
            .collect();
        assert_eq!(
            sites.len(),
            n_qubits,
            "grid too small for {n_qubits} qubits"
        );
        Placement::from_sites(sites, topo.num_sites())
    }

    pub fn from_sites(site_of: Vec<Site>, num_sites: usize) -> Placement {
        let mut occupant = vec![None; num_sites];
        for (q, &s) in site_of.iter().enumerate() {
            assert!(occupant[s].is_none(), "two qubits on dot {s}");
            occupant[s] = Some(q);
        }
        Placement { site_of, occupant }
    }

    pub fn n_qubits(&self) -> usize {
        self.site_of.len()
    }

    pub fn site(&self, q: usize) -> Site {
        self.site_of[q]
    }

    pub fn sites(&self) -> &[Site] {
        &self.site_of
    }

    pub fn occupant(&self, s: Site) -> Option<usize> {
        self.occupant[s]
    }

    pub fn is_empty(&self, s: Site) -> bool {
        self.occupant[s].is_none()
    }

    /// Moves the qubit on `from` to the empty dot `to`.
    pub fn shuttle(&mut self, from: Site, to: Site) {
        let q = self.occupant[from].expect("shuttle from an empty dot");
        assert!(self.occupant[to].is_none(), "shuttle onto an occupied dot");
        self.occupant[from] = None;
        self.occupant[to] = Some(q);
        self.site_of[q] = to;
    }

    /// Exchanges the contents of two dots.
    pub fn exchange(&mut self, a: Site, b: Site) {
        let (qa, qb) = (self.occupant[a], self.occupant[b]);
        self.occupant[a] = qb;
        self.occupant[b] = qa;
        if let Some(q) = qa {
            self.site_of[q] = b;
        }
        if let Some(q) = qb {
            self.site_of[q] = a;
        }
    }

    /// All occupied dots share one checkerboard color.
    pub fn is_checkerboard(&self, topo: &Topology) -> bool {
        let mut colors = self.site_of.iter().map(|&s| topo.is_even(s));
        match colors.next() {
            None => true,
            Some(first) => colors.all(|c| c == first),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design_space::Degree;

    #[test]
    fn checkerboard_layout() {
        let t = Topology::for_qubits(8, Degree::Four);
        let p = Placement::checkerboard(8, &t);
        assert_eq!(p.sites(), &[0, 2, 5, 7, 8, 10, 13, 15]);
        assert!(p.is_checkerboard(&t));
    }

    #[test]
    fn moves() {
        let t = Topology::grid(2, 2, Degree::Four);
        let mut p = Placement::checkerboard(2, &t);
        p.shuttle(0, 1);
        assert_eq!(p.site(0), 1);
        assert!(!p.is_checkerboard(&t));
        p.exchange(1, 3);
        assert_eq!((p.site(0), p.site(1)), (3, 1));
    }
}
