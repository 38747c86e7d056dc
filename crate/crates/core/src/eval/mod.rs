//! Reconstruction and estimation error metrics.

mod assignment;

pub use assignment::min_cost_assignment;

use std::collections::BTreeSet;

use crate::em::ApproximateModel;
use crate::error::{GraphletError, Result};
use crate::model::{CliqueBasis, GraphletModel, RateMatrix};
use crate::network::WeightedNetwork;
use crate::scalar::Scalar;

fn check_nodes<T: Scalar>(y: &WeightedNetwork, y_hat: &RateMatrix<T>) -> Result<()> {
    if y.node_count() != y_hat.node_count() {
        return Err(GraphletError::NodeMismatch(format!(
            "network has {} nodes, reconstruction has {}",
            y.node_count(),
            y_hat.node_count()
        )));
    }
    Ok(())
}

/// `Σ |Y - Ŷ|` over ordered pairs, divided by the total weight of `Y`.
pub fn l1_error<T: Scalar>(y: &WeightedNetwork, y_hat: &RateMatrix<T>) -> Result<T> {
    check_nodes(y, y_hat)?;
    let total = y.total_weight();
    if total == 0 {
        return Err(GraphletError::ZeroNormalizer("network has zero total weight"));
    }
    let mut diff = T::zero();
    for &(u, v, w) in y.edges() {
        diff += (T::from_count(w) - y_hat.get(u, v)).abs();
    }
    for (u, v, rate) in y_hat.entries() {
        if y.weight(u, v) == 0 {
            diff += rate.abs();
        }
    }
    Ok(diff * T::lit(2.0) / T::from_count(total))
}

/// Fraction of pairs, among those positive on either side, whose positivity disagrees.
pub fn support_error<T: Scalar>(y: &WeightedNetwork, y_hat: &RateMatrix<T>) -> Result<T> {
    check_nodes(y, y_hat)?;
    let observed: BTreeSet<(usize, usize)> = y.edges().iter().map(|&(u, v, _)| (u, v)).collect();
    let predicted: BTreeSet<(usize, usize)> = y_hat.positive_entries().map(|(u, v, _)| (u, v)).collect();
    let union = observed.union(&predicted).count();
    if union == 0 {
        return Ok(T::zero());
    }
    let disagree = observed.symmetric_difference(&predicted).count();
    Ok(T::from_usize(disagree).unwrap() / T::from_usize(union).unwrap())
}

/// `1 - τ(retained) / τ(full)` for an approximation of a model.
pub fn tau_error<T: Scalar>(approx: &ApproximateModel<T>) -> T {
    T::one() - approx.achieved_accuracy
}

/// Relative tau-norm discrepancy between two models, clamped to `[0, 1]`.
///
/// Equals [`tau_error`] when `estimate` keeps a subset of `truth`'s cliques and coefficients.
pub fn tau_gap<T: Scalar>(truth: &GraphletModel<T>, estimate: &GraphletModel<T>) -> Result<T> {
    let reference = truth.tau_norm();
    if !(reference > T::zero()) {
        return Err(GraphletError::ZeroNormalizer("reference model has zero tau norm"));
    }
    Ok(((reference - estimate.tau_norm()) / reference).abs().min(T::one()))
}

/// Optimal column matching between two bases.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatch {
    /// `(true column, estimated column)`; `None` is a zero padding column.
    pub pairs: Vec<(Option<usize>, Option<usize>)>,
    /// Total Hamming distance between matched indicator columns.
    pub raw: usize,
    /// `raw / (N · max(K, K̂))`.
    pub normalized: f64,
}

/// Matches columns of `b_true` and `b_hat` under Hamming cost, padding the smaller basis
/// with empty columns, and solves the assignment exactly.
pub fn match_bases(b_true: &CliqueBasis, b_hat: &CliqueBasis, n: usize) -> BasisMatch {
    let m = b_true.len().max(b_hat.len());
    let cost: Vec<Vec<i64>> = (0..m)
        .map(|i| (0..m).map(|j| hamming(column(b_true, i), column(b_hat, j)) as i64).collect())
        .collect();
    let (total, column_of) = min_cost_assignment(&cost);
    let pairs = column_of
        .iter()
        .enumerate()
        .map(|(i, &j)| ((i < b_true.len()).then_some(i), (j < b_hat.len()).then_some(j)))
        .collect();
    let raw = total as usize;
    let normalized = if m == 0 || n == 0 { 0.0 } else { raw as f64 / (n * m) as f64 };
    BasisMatch { pairs, raw, normalized }
}

fn column(b: &CliqueBasis, k: usize) -> &[usize] {
    if k < b.len() {
        b.clique(k)
    } else {
        &[]
    }
}

/// Symmetric difference size of two sorted node lists.
fn hamming(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    a.len() + b.len() - 2 * common
}

/// `||μ − μ̂||₂ / ||μ||₂` with coefficients paired by `matching`; padding pairs with zero.
pub fn mu_error<T: Scalar>(mu_true: &[T], mu_hat: &[T], matching: &BasisMatch) -> Result<T> {
    let norm = mu_true.iter().map(|&m| m * m).sum::<T>().sqrt();
    if !(norm > T::zero()) {
        return Err(GraphletError::ZeroNormalizer("true coefficients are all zero"));
    }
    let diff = matching
        .pairs
        .iter()
        .map(|&(i, j)| {
            let a = i.map_or(T::zero(), |i| mu_true[i]);
            let b = j.map_or(T::zero(), |j| mu_hat[j]);
            (a - b) * (a - b)
        })
        .sum::<T>()
        .sqrt();
    Ok(diff / norm)
}

pub fn k_error(k_true: usize, k_hat: usize) -> usize {
    k_true.abs_diff(k_hat)
}

/// One row of the metric suite.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub l1_error: f64,
    pub tau_error: f64,
    pub support_error: f64,
    pub basis_error_raw: usize,
    pub basis_error_normalized: f64,
    pub mu_error: f64,
    pub k_error: usize,
}

impl EvalReport {
    /// Column names in output order. New columns are only ever appended.
    pub const COLUMNS: [&'static str; 7] = [
        "l1_error",
        "tau_error",
        "support_error",
        "basis_error_raw",
        "basis_error_normalized",
        "mu_error",
        "k_error",
    ];

    pub fn tsv_header() -> String {
        Self::COLUMNS.join("\t")
    }

    pub fn to_tsv_row(&self) -> String {
        format!(
            "{:.6}\t{:.6}\t{:.6}\t{}\t{:.6}\t{:.6}\t{}",
            self.l1_error,
            self.tau_error,
            self.support_error,
            self.basis_error_raw,
            self.basis_error_normalized,
            self.mu_error,
            self.k_error
        )
    }

    /// Compares an estimated model against the generating one and the observed network.
    pub fn compare<T: Scalar>(
        y: &WeightedNetwork,
        truth: &GraphletModel<T>,
        estimate: &GraphletModel<T>,
    ) -> Result<Self> {
        if truth.node_count() != estimate.node_count() || truth.node_count() != y.node_count() {
            return Err(GraphletError::NodeMismatch(format!(
                "truth {} nodes, estimate {} nodes, network {} nodes",
                truth.node_count(),
                estimate.node_count(),
                y.node_count()
            )));
        }
        let y_hat = estimate.rate_matrix();
        let matching = match_bases(truth.basis(), estimate.basis(), truth.node_count());
        let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
        Ok(Self {
            l1_error: f(l1_error(y, &y_hat)?),
            tau_error: f(tau_gap(truth, estimate)?),
            support_error: f(support_error(y, &y_hat)?),
            basis_error_raw: matching.raw,
            basis_error_normalized: matching.normalized,
            mu_error: f(mu_error(truth.mu(), estimate.mu(), &matching)?),
            k_error: k_error(truth.len(), estimate.len()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::truncate_to_count;

    fn basis(cliques: &[&[usize]]) -> CliqueBasis {
        CliqueBasis::new(cliques.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    fn triangle(w: u64) -> WeightedNetwork {
        WeightedNetwork::from_edges(3, [(0, 1, w), (1, 2, w), (0, 2, w)]).unwrap()
    }

    #[test]
    fn l1_examples() {
        let y = triangle(2);
        let exact = RateMatrix::<f64>::from_network(&y);
        assert_eq!(l1_error(&y, &exact).unwrap(), 0.0);
        assert_eq!(l1_error(&y, &RateMatrix::<f64>::zeros(3)).unwrap(), 1.0);
        let half = RateMatrix::from_network(&triangle(1));
        assert_eq!(l1_error::<f64>(&y, &half).unwrap(), 0.5);
        let empty = WeightedNetwork::from_edges(3, []).unwrap();
        assert!(l1_error(&empty, &exact).is_err());
        assert!(l1_error(&y, &RateMatrix::<f64>::zeros(4)).is_err());
    }

    #[test]
    fn support_examples() {
        let y = triangle(2);
        assert_eq!(support_error(&y, &RateMatrix::<f64>::from_network(&y)).unwrap(), 0.0);
        assert_eq!(support_error(&y, &RateMatrix::<f64>::zeros(3)).unwrap(), 1.0);
        let y = WeightedNetwork::from_edges(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let y_hat = RateMatrix::from_entries(3, [(0, 1, 0.5), (0, 2, 2.0)]).unwrap();
        assert!((support_error::<f64>(&y, &y_hat).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let empty = WeightedNetwork::from_edges(3, []).unwrap();
        assert_eq!(support_error(&empty, &RateMatrix::<f64>::zeros(3)).unwrap(), 0.0);
    }

    #[test]
    fn tau_error_examples() {
        let m = GraphletModel::new(8, basis(&[&[0, 1, 2], &[3, 4], &[5, 6, 7]]), vec![2.0, 3.0, 1.0]).unwrap();
        assert_eq!(tau_error(&truncate_to_count(&m, 3).unwrap()), 0.0);
        assert_eq!(tau_error(&truncate_to_count(&m, 0).unwrap()), 1.0);
        assert!((tau_error::<f64>(&truncate_to_count(&m, 2).unwrap()) - 0.2).abs() < 1e-15);
        let dropped = truncate_to_count(&m, 2).unwrap().model;
        assert!((tau_gap::<f64>(&m, &dropped).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn basis_matching_examples() {
        let b = basis(&[&[0, 1, 2], &[2, 3], &[1, 4]]);
        let permuted = basis(&[&[1, 4], &[0, 1, 2], &[2, 3]]);
        let m = match_bases(&b, &permuted, 5);
        assert_eq!(m.raw, 0);
        assert_eq!(m.pairs, vec![(Some(0), Some(1)), (Some(1), Some(2)), (Some(2), Some(0))]);

        let m = match_bases(&basis(&[&[0, 1, 2]]), &basis(&[&[0, 1]]), 4);
        assert_eq!(m.raw, 1);
        assert_eq!(m.normalized, 0.25);

        let m = match_bases(&CliqueBasis::empty(), &basis(&[&[0, 1]]), 4);
        assert_eq!(m.raw, 2);
        assert_eq!(m.pairs, vec![(None, Some(0))]);
    }

    #[test]
    fn mu_error_examples() {
        let b = basis(&[&[0, 1], &[2, 3]]);
        let same = match_bases(&b, &b, 4);
        assert_eq!(mu_error(&[3.0, 4.0], &[3.0, 4.0], &same).unwrap(), 0.0);
        assert_eq!(mu_error(&[3.0, 4.0], &[6.0, 8.0], &same).unwrap(), 1.0);
        assert!((mu_error::<f64>(&[3.0, 4.0], &[3.0, 0.0], &same).unwrap() - 0.8).abs() < 1e-15);
        assert!(mu_error(&[0.0, 0.0], &[1.0, 1.0], &same).is_err());
        // Unmatched true columns pair with zero.
        let partial = match_bases(&b, &basis(&[&[0, 1]]), 4);
        assert!((mu_error::<f64>(&[3.0, 4.0], &[3.0], &partial).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn k_error_examples() {
        assert_eq!(k_error(30, 30), 0);
        assert_eq!(k_error(30, 31), 1);
        assert_eq!(k_error(12, 9), 3);
    }

    #[test]
    fn report_row_for_identical_models() {
        let truth = GraphletModel::new(4, basis(&[&[0, 1, 2], &[2, 3]]), vec![1.0, 3.0]).unwrap();
        let y = truth.rate_matrix().to_network().unwrap();
        let report = EvalReport::compare(&y, &truth, &truth).unwrap();
        assert_eq!(report.to_tsv_row(), "0.000000\t0.000000\t0.000000\t0\t0.000000\t0.000000\t0");
        assert_eq!(EvalReport::tsv_header().split('\t').count(), 7);
    }
}
