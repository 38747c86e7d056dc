//! Non-expandability and exact recovery of a noise-free rate matrix.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{maximal_cliques, maximal_cliques_with_edge, BinaryGraph};
use crate::error::{GraphletError, Result};
use crate::model::{clique_pairs, CliqueBasis, GraphletModel, RateMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonExpandability {
    pub non_expandable: bool,
    /// A maximal clique of the union graph missing from the basis.
    pub witness: Option<Vec<usize>>,
    /// `(k, j)` when clique `k` is contained in clique `j`. Such a basis can pass the
    /// maximal-clique check while clique `k` owns no edge of its own.
    pub nested: Option<(usize, usize)>,
}

impl NonExpandability {
    /// Non-expandable and free of nested members.
    pub fn is_strict(&self) -> bool {
        self.non_expandable && self.nested.is_none()
    }
}

/// A basis is non-expandable when every maximal clique of its union graph is a member.
pub fn is_non_expandable(basis: &CliqueBasis) -> NonExpandability {
    let union = BinaryGraph::union_of(basis, basis.min_node_count());
    let witness = maximal_cliques(&union).into_iter().find(|c| !basis.contains(c));
    NonExpandability { non_expandable: witness.is_none(), witness, nested: find_nested(basis) }
}

fn find_nested(basis: &CliqueBasis) -> Option<(usize, usize)> {
    let cliques = basis.cliques();
    (0..cliques.len()).find_map(|k| {
        (0..cliques.len())
            .find(|&j| j != k && is_subset(&cliques[k], &cliques[j]))
            .map(|j| (k, j))
    })
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.len() <= big.len() && small.iter().all(|v| big.binary_search(v).is_ok())
}

/// For each clique, its lexicographically smallest edge not shared with any other clique.
pub fn unique_edge_witnesses(basis: &CliqueBasis) -> Result<Vec<(usize, (usize, usize))>> {
    if let Some(witness) = is_non_expandable(basis).witness {
        return Err(GraphletError::Expandable(witness));
    }
    let mut multiplicity: HashMap<(usize, usize), usize> = HashMap::new();
    for clique in basis.cliques() {
        for pair in clique_pairs(clique) {
            *multiplicity.entry(pair).or_insert(0) += 1;
        }
    }
    basis
        .cliques()
        .iter()
        .enumerate()
        .map(|(k, clique)| {
            clique_pairs(clique)
                .find(|p| multiplicity[p] == 1)
                .map(|p| (k, p))
                .ok_or(GraphletError::NoUniqueEdge(k))
        })
        .collect()
}

/// Peels a rate matrix generated by a non-expandable basis into its cliques.
///
/// Each round takes the smallest positive entry, finds the largest maximal clique of
/// the residual support through that edge (ties broken lexicographically) and
/// subtracts the entry's value from every edge of the clique. Residuals within
/// `1e-9 * max entry` of zero count as zero.
pub fn exact_decompose<T: Scalar>(lambda: &RateMatrix<T>) -> Result<GraphletModel<T>> {
    let n = lambda.node_count();
    let max_entry = lambda.entries().map(|e| e.2).fold(T::zero(), T::max);
    let tol = T::tolerance(1e-9) * max_entry;
    let mut residual: BTreeMap<(usize, usize), T> =
        lambda.entries().filter(|e| e.2 > tol).map(|(u, v, w)| ((u, v), w)).collect();
    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(u, v) in residual.keys() {
        adjacency[u].insert(v);
        adjacency[v].insert(u);
    }

    // Each round zeroes at least the entry it starts from.
    let cap = residual.len();
    let mut recovered: Vec<(Vec<usize>, T)> = Vec::new();
    let mut rounds = 0;
    while let Some((&(i, j), &mu_c)) = residual.iter().min_by(|a, b| {
        a.1.partial_cmp(b.1).expect("finite rates").then_with(|| a.0.cmp(b.0))
    }) {
        rounds += 1;
        if rounds > cap {
            return Err(GraphletError::IterationCap(cap));
        }
        let clique = largest_clique_through(&adjacency, i, j);
        for (u, v) in clique_pairs(&clique) {
            let entry = residual.get_mut(&(u, v)).expect("clique edges lie in the support");
            let left = *entry - mu_c;
            if left < -tol {
                return Err(GraphletError::NegativeResidual { i: u, j: v, value: left.to_f64().unwrap_or(f64::NAN) });
            }
            if left <= tol {
                residual.remove(&(u, v));
                adjacency[u].remove(&v);
                adjacency[v].remove(&u);
            } else {
                *entry = left;
            }
        }
        match recovered.iter_mut().find(|(c, _)| *c == clique) {
            Some((_, m)) => *m += mu_c,
            None => recovered.push((clique, mu_c)),
        }
    }
    let (cliques, mu): (Vec<_>, Vec<_>) = recovered.into_iter().unzip();
    GraphletModel::new(n, CliqueBasis::from_canonical(cliques), mu)
}

/// Largest maximal clique containing edge `(i, j)`, searched in the subgraph induced by
/// `{i, j}` and their common neighbors.
fn largest_clique_through(adjacency: &[BTreeSet<usize>], i: usize, j: usize) -> Vec<usize> {
    let mut local: Vec<usize> = adjacency[i].intersection(&adjacency[j]).copied().collect();
    local.push(i);
    local.push(j);
    local.sort_unstable();
    let index_of = |v: usize| local.binary_search(&v).unwrap();
    let edges: Vec<(usize, usize)> = local
        .iter()
        .flat_map(|&u| {
            adjacency[u]
                .iter()
                .filter(move |&&v| v > u)
                .filter(|&&v| local.binary_search(&v).is_ok())
                .map(move |&v| (u, v))
        })
        .map(|(u, v)| (index_of(u), index_of(v)))
        .collect();
    let g = BinaryGraph::from_edges(local.len(), edges);
    // Candidates arrive sorted lexicographically (local relabeling preserves order),
    // so the first of maximal size wins ties.
    let best = maximal_cliques_with_edge(&g, index_of(i), index_of(j))
        .into_iter()
        .fold(Vec::new(), |best: Vec<usize>, c| if c.len() > best.len() { c } else { best });
    best.into_iter().map(|k| local[k]).collect()
}
