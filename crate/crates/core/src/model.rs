//! Clique bases, graphlet models and the Poisson rate matrix they induce.

use std::collections::{BTreeMap, HashSet};

use crate::error::{GraphletError, Result};
use crate::network::WeightedNetwork;
use crate::scalar::Scalar;

/// Ordered collection of distinct cliques, each a sorted node list of size at least two.
///
/// This is the binary factor matrix with one column per clique.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CliqueBasis {
    cliques: Vec<Vec<usize>>,
}

impl CliqueBasis {
    pub fn new(cliques: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(cliques.len());
        let mut canonical = Vec::with_capacity(cliques.len());
        for mut clique in cliques {
            clique.sort_unstable();
            if clique.windows(2).any(|w| w[0] == w[1]) {
                return Err(GraphletError::InvalidClique(clique, "repeated node"));
            }
            if clique.len() < 2 {
                return Err(GraphletError::InvalidClique(clique, "fewer than two nodes"));
            }
            if !seen.insert(clique.clone()) {
                return Err(GraphletError::DuplicateClique(clique));
            }
            canonical.push(clique);
        }
        Ok(Self { cliques: canonical })
    }

    /// Builds a basis from cliques already known to be canonical and unique.
    pub(crate) fn from_canonical(cliques: Vec<Vec<usize>>) -> Self {
        debug_assert!(cliques.iter().all(|c| c.len() >= 2 && c.windows(2).all(|w| w[0] < w[1])));
        Self { cliques }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    pub fn clique(&self, k: usize) -> &[usize] {
        &self.cliques[k]
    }

    /// Number of members `a_k` of clique `k`.
    pub fn clique_size(&self, k: usize) -> usize {
        self.cliques[k].len()
    }

    /// Ordered-pair count `a_k (a_k - 1)` of clique `k`.
    pub fn ordered_pairs(&self, k: usize) -> usize {
        let a = self.clique_size(k);
        a * (a - 1)
    }

    /// Largest node index referenced plus one.
    pub fn min_node_count(&self) -> usize {
        self.cliques.iter().filter_map(|c| c.last()).map(|&m| m + 1).max().unwrap_or(0)
    }

    pub fn contains(&self, clique: &[usize]) -> bool {
        self.cliques.iter().any(|c| c.as_slice() == clique)
    }

    /// Keeps the cliques whose index satisfies `keep`, preserving order.
    pub fn select(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        Self {
            cliques: self
                .cliques
                .iter()
                .enumerate()
                .filter(|(k, _)| keep(*k))
                .map(|(_, c)| c.clone())
                .collect(),
        }
    }

    /// Unordered pairs covered by at least one clique, sorted.
    pub fn covered_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self.cliques.iter().flat_map(|c| clique_pairs(c)).collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }
}

/// All unordered pairs `(c[i], c[j])`, `i < j`, of a sorted clique.
pub fn clique_pairs(clique: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    clique
        .iter()
        .enumerate()
        .flat_map(move |(i, &u)| clique[i + 1..].iter().map(move |&v| (u, v)))
}

/// A clique basis with one nonnegative coefficient per clique.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphletModel<T> {
    n: usize,
    basis: CliqueBasis,
    mu: Vec<T>,
}

impl<T: Scalar> GraphletModel<T> {
    /// `n` is the size of the node universe; every clique must lie inside it.
    pub fn new(n: usize, basis: CliqueBasis, mu: Vec<T>) -> Result<Self> {
        if mu.len() != basis.len() {
            return Err(GraphletError::LengthMismatch { expected: basis.len(), got: mu.len() });
        }
        if let Some(bad) = mu.iter().find(|m| !(m.is_finite() && **m >= T::zero())) {
            return Err(GraphletError::InvalidCoefficient(bad.to_f64().unwrap_or(f64::NAN)));
        }
        if basis.min_node_count() > n {
            return Err(GraphletError::NodeOutOfRange { index: basis.min_node_count() - 1, n });
        }
        Ok(Self { n, basis, mu })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &CliqueBasis {
        &self.basis
    }

    pub fn mu(&self) -> &[T] {
        &self.mu
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// True when every coefficient is strictly positive.
    pub fn is_reduced(&self) -> bool {
        self.mu.iter().all(|&m| m > T::zero())
    }

    /// Drops cliques with a zero coefficient.
    pub fn reduced(&self) -> Self {
        self.select(|k| self.mu[k] > T::zero())
    }

    pub fn select(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        let flags: Vec<bool> = (0..self.len()).map(&mut keep).collect();
        Self {
            n: self.n,
            basis: self.basis.select(|k| flags[k]),
            mu: self.mu.iter().zip(&flags).filter(|(_, &f)| f).map(|(&m, _)| m).collect(),
        }
    }

    /// Per-clique tau mass `mu_k * a_k`.
    pub fn tau_masses(&self) -> Vec<T> {
        self.mu
            .iter()
            .enumerate()
            .map(|(k, &m)| m * T::from_usize(self.basis.clique_size(k)).unwrap())
            .collect()
    }

    /// Size-weighted coefficient mass `sum_k mu_k a_k`.
    pub fn tau_norm(&self) -> T {
        self.tau_masses().into_iter().sum()
    }

    /// Entry `(i, j)` is the sum of coefficients of cliques containing both nodes.
    pub fn rate_matrix(&self) -> RateMatrix<T> {
        let mut entries: BTreeMap<(usize, usize), T> = BTreeMap::new();
        for (clique, &m) in self.basis.cliques().iter().zip(&self.mu) {
            for pair in clique_pairs(clique) {
                *entries.entry(pair).or_insert_with(T::zero) += m;
            }
        }
        RateMatrix { n: self.n, entries }
    }

    pub fn cast<U: Scalar>(&self) -> GraphletModel<U> {
        GraphletModel {
            n: self.n,
            basis: self.basis.clone(),
            mu: self.mu.iter().map(|m| U::from(*m).unwrap()).collect(),
        }
    }
}

/// Sparse symmetric nonnegative rate matrix with zero diagonal.
///
/// Only pairs covered by at least one clique (or set explicitly) are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix<T> {
    n: usize,
    entries: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> RateMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, entries: BTreeMap::new() }
    }

    pub fn from_entries<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let mut out = Self::zeros(n);
        for (u, v, w) in entries {
            if u == v {
                return Err(GraphletError::SelfLoop(u));
            }
            if u.max(v) >= n {
                return Err(GraphletError::NodeOutOfRange { index: u.max(v), n });
            }
            if !(w.is_finite() && w >= T::zero()) {
                return Err(GraphletError::InvalidCoefficient(w.to_f64().unwrap_or(f64::NAN)));
            }
            *out.entries.entry((u.min(v), u.max(v))).or_insert_with(T::zero) += w;
        }
        Ok(out)
    }

    pub fn from_network(y: &WeightedNetwork) -> Self {
        Self {
            n: y.node_count(),
            entries: y.edges().iter().map(|&(u, v, w)| ((u, v), T::from_count(w))).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> T {
        if u == v {
            return T::zero();
        }
        self.entries.get(&(u.min(v), u.max(v))).copied().unwrap_or_else(T::zero)
    }

    /// Stored unordered entries `(u, v, rate)` with `u < v`, sorted.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.entries.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    /// Entries with a strictly positive rate.
    pub fn positive_entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.entries().filter(|e| e.2 > T::zero())
    }

    /// Sum over ordered pairs.
    pub fn total(&self) -> T {
        self.entries.values().copied().sum::<T>() * T::lit(2.0)
    }

    /// Converts to an integer network when every entry is a nonnegative integer.
    pub fn to_network(&self) -> Option<WeightedNetwork> {
        let mut edges = Vec::new();
        for (u, v, w) in self.positive_entries() {
            if w.fract() != T::zero() {
                return None;
            }
            edges.push((u, v, w.to_u64()?));
        }
        WeightedNetwork::from_edges(self.n, edges).ok()
    }
}
