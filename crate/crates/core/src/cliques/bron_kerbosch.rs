//! Pivoted Bron-Kerbosch with degeneracy ordering at the outermost level.

use rayon::prelude::*;

use super::BinaryGraph;

/// Graphs with at least this many nodes enumerate top-level branches in parallel.
const PARALLEL_NODES: usize = 512;

/// All maximal cliques with at least two nodes, each sorted, listed in lexicographic order.
pub fn maximal_cliques(g: &BinaryGraph) -> Vec<Vec<usize>> {
    let order = degeneracy_order(g);
    let mut position = vec![0usize; g.node_count()];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let branch = |&v: &usize| {
        let (mut later, mut earlier) = (Vec::new(), Vec::new());
        for &u in g.neighbors(v) {
            if position[u] > position[v] {
                later.push(u);
            } else {
                earlier.push(u);
            }
        }
        let mut out = Vec::new();
        expand(g, &mut vec![v], later, earlier, &mut out);
        out
    };
    let mut cliques: Vec<Vec<usize>> = if g.node_count() >= PARALLEL_NODES {
        order.par_iter().flat_map_iter(branch).collect()
    } else {
        order.iter().flat_map(branch).collect()
    };
    finish(&mut cliques);
    cliques
}

/// Maximal cliques that contain both `u` and `v`; empty when they are not adjacent.
pub fn maximal_cliques_with_edge(g: &BinaryGraph, u: usize, v: usize) -> Vec<Vec<usize>> {
    if u == v || !g.has_edge(u, v) {
        return Vec::new();
    }
    let common = intersect(g.neighbors(u), g.neighbors(v));
    let mut out = Vec::new();
    expand(g, &mut vec![u, v], common, Vec::new(), &mut out);
    finish(&mut out);
    out
}

fn finish(cliques: &mut [Vec<usize>]) {
    for c in cliques.iter_mut() {
        c.sort_unstable();
    }
    cliques.sort_unstable();
}

fn expand(
    g: &BinaryGraph,
    current: &mut Vec<usize>,
    mut candidates: Vec<usize>,
    mut excluded: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if candidates.is_empty() {
        if excluded.is_empty() && current.len() >= 2 {
            out.push(current.clone());
        }
        return;
    }
    // Pivot maximizes |N(u) ∩ P| over P ∪ X.
    let pivot = candidates
        .iter()
        .chain(excluded.iter())
        .copied()
        .max_by_key(|&u| (intersection_size(g.neighbors(u), &candidates), std::cmp::Reverse(u)))
        .expect("nonempty");
    let pivot_neighbors = g.neighbors(pivot);
    let branch: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|v| pivot_neighbors.binary_search(v).is_err())
        .collect();
    for v in branch {
        let nv = g.neighbors(v);
        current.push(v);
        expand(g, current, intersect(&candidates, nv), intersect(&excluded, nv), out);
        current.pop();
        if let Ok(i) = candidates.binary_search(&v) {
            candidates.remove(i);
        }
        if let Err(i) = excluded.binary_search(&v) {
            excluded.insert(i, v);
        }
    }
}

/// Matula-Beck smallest-last ordering.
fn degeneracy_order(g: &BinaryGraph) -> Vec<usize> {
    let n = g.node_count();
    let mut degree: Vec<usize> = (0..n).map(|v| g.neighbors(v).len()).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); max_degree + 1];
    for v in 0..n {
        buckets[degree[v]].push(v);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut d = 0;
    while order.len() < n {
        d = d.min(max_degree);
        while buckets[d].is_empty() {
            d += 1;
        }
        let v = buckets[d].pop().unwrap();
        if removed[v] || degree[v] != d {
            continue;
        }
        removed[v] = true;
        order.push(v);
        for &u in g.neighbors(v) {
            if !removed[u] {
                degree[u] -= 1;
                buckets[degree[u]].push(u);
            }
        }
        d = d.saturating_sub(1);
    }
    order
}

pub(crate) fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}
