//! Threshold sweep: candidate cliques from every level set `1(Y >= t)`.

use std::collections::HashSet;

use super::{maximal_cliques_with_edge, BinaryGraph};
use crate::error::{GraphletError, Result};
use crate::model::{CliqueBasis, RateMatrix};
use crate::network::WeightedNetwork;
use crate::scalar::Scalar;

/// Bookkeeping from one sweep over the distinct positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSweepReport<W> {
    /// Distinct positive weights, strictly decreasing.
    pub thresholds: Vec<W>,
    /// Cliques first discovered at each threshold.
    pub new_cliques_per_threshold: Vec<usize>,
}

impl<W> ThresholdSweepReport<W> {
    /// Number of thresholds visited.
    pub fn q(&self) -> usize {
        self.thresholds.len()
    }
}

pub fn candidate_basis(y: &WeightedNetwork) -> Result<(CliqueBasis, ThresholdSweepReport<u64>)> {
    candidate_basis_weighted(y.node_count(), y.edges())
}

/// Sweep over a real-valued rate matrix; only strictly positive entries take part.
pub fn candidate_basis_rates<T: Scalar>(
    lambda: &RateMatrix<T>,
) -> Result<(CliqueBasis, ThresholdSweepReport<T>)> {
    let edges: Vec<(usize, usize, T)> = lambda.positive_entries().collect();
    candidate_basis_weighted(lambda.node_count(), &edges)
}

/// Union over thresholds `t` (distinct positive weights, descending) of the maximal
/// cliques of the graph with edges `w >= t`, deduplicated in discovery order.
///
/// A clique maximal at threshold `t` whose edges all survive the previous threshold
/// was already maximal there, so each level only enumerates cliques through the
/// edges that first appear at it.
pub fn candidate_basis_weighted<W: PartialOrd + Copy>(
    n: usize,
    edges: &[(usize, usize, W)],
) -> Result<(CliqueBasis, ThresholdSweepReport<W>)> {
    let mut sorted: Vec<(usize, usize, W)> = edges.to_vec();
    if sorted.is_empty() {
        return Err(GraphletError::EmptyNetwork);
    }
    sorted.sort_by(|a, b| b.2.partial_cmp(&a.2).expect("comparable weights"));

    let mut graph = BinaryGraph::from_edges(n, std::iter::empty());
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut cliques = Vec::new();
    let mut report = ThresholdSweepReport { thresholds: Vec::new(), new_cliques_per_threshold: Vec::new() };

    let mut start = 0;
    while start < sorted.len() {
        let t = sorted[start].2;
        let end = start + sorted[start..].iter().take_while(|e| e.2 == t).count();
        let level = &sorted[start..end];
        for &(u, v, _) in level {
            graph.insert_edge(u, v);
        }
        let mut fresh: Vec<Vec<usize>> = Vec::new();
        for &(u, v, _) in level {
            for clique in maximal_cliques_with_edge(&graph, u, v) {
                if seen.insert(clique.clone()) {
                    fresh.push(clique);
                }
            }
        }
        fresh.sort_unstable();
        report.thresholds.push(t);
        report.new_cliques_per_threshold.push(fresh.len());
        cliques.extend(fresh);
        start = end;
    }
    Ok((CliqueBasis::from_canonical(cliques), report))
}
