//! Integer-weighted undirected networks.

use std::collections::{BTreeMap, HashMap};

use crate::error::{GraphletError, Result};

/// Largest supported exponent for [`WeightedNetwork::power`].
pub const MAX_POWER: u32 = 5;

/// An undirected network with positive integer edge weights and no self-loops.
///
/// Each unordered pair is stored once, as `(u, v)` with `u < v`; absent pairs
/// have weight zero. Edges are kept sorted, so lookups are binary searches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedNetwork {
    labels: Vec<String>,
    edges: Vec<(usize, usize, u64)>,
}

impl WeightedNetwork {
    /// Builds a network over `n` unlabeled nodes (labels become `"0"`, `"1"`, ...).
    ///
    /// Duplicate pairs are summed and `(v, u)` is identified with `(u, v)`.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        Self::with_labels((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn with_labels<I>(labels: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        let n = labels.len();
        let mut merged: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (u, v, w) in edges {
            if u == v {
                return Err(GraphletError::SelfLoop(u));
            }
            for index in [u, v] {
                if index >= n {
                    return Err(GraphletError::NodeOutOfRange { index, n });
                }
            }
            if w == 0 {
                return Err(GraphletError::ZeroWeight(u, v));
            }
            let slot = merged.entry((u.min(v), u.max(v))).or_insert(0);
            *slot = slot.checked_add(w).ok_or(GraphletError::WeightOverflow)?;
        }
        Ok(Self { labels, edges: merged.into_iter().map(|((u, v), w)| (u, v, w)).collect() })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Stored undirected edges, sorted, `u < v`.
    pub fn edges(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, u: usize, v: usize) -> u64 {
        if u == v {
            return 0;
        }
        let key = (u.min(v), u.max(v));
        self.edges
            .binary_search_by(|&(a, b, _)| (a, b).cmp(&key))
            .map(|i| self.edges[i].2)
            .unwrap_or(0)
    }

    pub fn max_weight(&self) -> Option<u64> {
        self.edges.iter().map(|e| e.2).max()
    }

    /// Sum over ordered pairs `i != j`, i.e. twice the stored weight.
    pub fn total_weight(&self) -> u64 {
        2 * self.edges.iter().map(|e| e.2).sum::<u64>()
    }

    /// The same network with every positive weight reset to one.
    pub fn binarized(&self) -> Self {
        Self {
            labels: self.labels.clone(),
            edges: self.edges.iter().map(|&(u, v, _)| (u, v, 1)).collect(),
        }
    }

    /// `k`-th matrix power of the adjacency matrix, diagonal dropped after the final product.
    pub fn power(&self, k: u32) -> Result<Self> {
        self.power_capped(k, MAX_POWER)
    }

    pub fn power_capped(&self, k: u32, cap: u32) -> Result<Self> {
        if k == 0 || k > cap {
            return Err(GraphletError::PowerOutOfRange(k, cap));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let n = self.node_count();
        let mut adjacency: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
        for &(u, v, w) in &self.edges {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        // Intermediate products keep their diagonal.
        let mut current: Vec<HashMap<usize, u64>> = adjacency
            .iter()
            .map(|row| row.iter().copied().collect())
            .collect();
        for _ in 1..k {
            let mut next: Vec<HashMap<usize, u64>> = vec![HashMap::new(); n];
            for (row, entries) in current.iter().enumerate() {
                for (&mid, &a) in entries {
                    for &(col, b) in &adjacency[mid] {
                        let prod = a.checked_mul(b).ok_or(GraphletError::WeightOverflow)?;
                        let slot = next[row].entry(col).or_insert(0);
                        *slot = slot.checked_add(prod).ok_or(GraphletError::WeightOverflow)?;
                    }
                }
            }
            current = next;
        }
        let edges = current
            .iter()
            .enumerate()
            .flat_map(|(u, row)| {
                row.iter().filter(move |(&v, &w)| v > u && w > 0).map(move |(&v, &w)| (u, v, w))
            })
            .collect::<Vec<_>>();
        Self::with_labels(self.labels.clone(), edges)
    }
}
