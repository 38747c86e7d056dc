//! Maximal-clique machinery: enumeration, the threshold sweep producing candidate
//! bases, non-expandability checks and exact noise-free recovery.

mod bron_kerbosch;
mod recovery;
mod sweep;

pub use bron_kerbosch::{maximal_cliques, maximal_cliques_with_edge};
pub use recovery::{exact_decompose, is_non_expandable, unique_edge_witnesses, NonExpandability};
pub use sweep::{candidate_basis, candidate_basis_rates, candidate_basis_weighted, ThresholdSweepReport};

use crate::model::{clique_pairs, CliqueBasis};

/// Unweighted simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryGraph {
    adjacency: Vec<Vec<usize>>,
}

impl BinaryGraph {
    /// Self-loops are ignored and repeated edges collapse.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        for row in &mut adjacency {
            row.sort_unstable();
            row.dedup();
        }
        Self { adjacency }
    }

    /// The union graph of a basis: a pair is adjacent when some clique contains both nodes.
    pub fn union_of(basis: &CliqueBasis, n: usize) -> Self {
        Self::from_edges(n, basis.cliques().iter().flat_map(|c| clique_pairs(c)))
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency.get(u).is_some_and(|row| row.binary_search(&v).is_ok())
    }

    pub(crate) fn insert_edge(&mut self, u: usize, v: usize) {
        for (a, b) in [(u, v), (v, u)] {
            let row = &mut self.adjacency[a];
            if let Err(i) = row.binary_search(&b) {
                row.insert(i, b);
            }
        }
    }

    pub fn is_clique(&self, nodes: &[usize]) -> bool {
        nodes
            .iter()
            .enumerate()
            .all(|(i, &u)| nodes[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }
}
