//! Random graphlet models and Poisson network draws.

use std::collections::HashSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson};

use crate::cliques::is_non_expandable;
use crate::error::{GraphletError, Result};
use crate::model::{CliqueBasis, GraphletModel};
use crate::network::WeightedNetwork;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n: usize,
    /// Poisson rate for the number of cliques.
    pub lambda_k: f64,
    pub gamma_shape: f64,
    pub gamma_scale: f64,
    /// Probability that a node belongs to a given clique.
    pub bernoulli_p: f64,
    pub seed: u64,
    pub require_nonexpandable: bool,
    /// Cap on whole-basis rejections, and on redraws of any single column.
    pub max_rejects: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n: 50,
            lambda_k: 30.0,
            gamma_shape: 1.0,
            gamma_scale: 10.0,
            bernoulli_p: 0.04,
            seed: 0,
            require_nonexpandable: false,
            max_rejects: 10_000,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(GraphletError::InvalidConfig(msg));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if !(self.lambda_k > 0.0 && self.lambda_k.is_finite()) {
            return bad(format!("lambda_k must be positive, got {}", self.lambda_k));
        }
        if !(self.gamma_shape > 0.0 && self.gamma_shape.is_finite()) {
            return bad(format!("gamma shape must be positive, got {}", self.gamma_shape));
        }
        if !(self.gamma_scale > 0.0 && self.gamma_scale.is_finite()) {
            return bad(format!("gamma scale must be positive, got {}", self.gamma_scale));
        }
        if !(self.bernoulli_p > 0.0 && self.bernoulli_p < 1.0) {
            return bad(format!("p must lie in (0, 1), got {}", self.bernoulli_p));
        }
        Ok(())
    }
}

/// How a rate becomes an observed count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Link {
    /// Plain Poisson; zero draws leave the pair absent.
    #[default]
    Poisson,
    /// Poisson conditioned on being at least one, so every pair of the rate support is present.
    ZeroTruncated,
}

/// Draws a model: `K ~ Poisson(lambda_k)` conditioned on `K >= 1`, a random basis of
/// `K` cliques and `μ_k ~ Gamma(shape, scale)`.
pub fn sample_model<T: Scalar>(config: &SynthConfig) -> Result<GraphletModel<T>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let k = sample_clique_count(config.lambda_k, &mut rng);
    let basis = sample_basis(config, k, &mut rng)?;
    let gamma = Gamma::new(config.gamma_shape, config.gamma_scale)
        .map_err(|e| GraphletError::InvalidConfig(e.to_string()))?;
    let mu = (0..basis.len()).map(|_| T::lit(gamma.sample(&mut rng))).collect();
    GraphletModel::new(config.n, basis, mu)
}

fn sample_clique_count<R: Rng>(lambda: f64, rng: &mut R) -> usize {
    let poisson = Poisson::new(lambda).expect("validated rate");
    loop {
        let k: f64 = poisson.sample(rng);
        if k >= 1.0 {
            return k as usize;
        }
    }
}

/// Draws `k` distinct cliques whose membership indicators are iid Bernoulli(p).
///
/// Columns with fewer than two members or duplicating an earlier column are redrawn; a
/// column still failing after `max_rejects` redraws is dropped, so the result can hold
/// fewer than `k` cliques when `p` is extreme. With `require_nonexpandable` the whole
/// basis is redrawn until it is non-expandable with no clique nested in another.
pub fn sample_basis<R: Rng>(config: &SynthConfig, k: usize, rng: &mut R) -> Result<CliqueBasis> {
    for _ in 0..=config.max_rejects {
        let basis = draw_columns(config, k, rng);
        if !config.require_nonexpandable || is_non_expandable(&basis).is_strict() {
            return Ok(basis);
        }
    }
    Err(GraphletError::RejectionCap(config.max_rejects))
}

fn draw_columns<R: Rng>(config: &SynthConfig, k: usize, rng: &mut R) -> CliqueBasis {
    // A Binomial member count followed by a uniform subset has the law of n Bernoulli draws.
    let size = Binomial::new(config.n as u64, config.bernoulli_p).expect("validated probability");
    let mut seen = HashSet::with_capacity(k);
    let mut cliques: Vec<Vec<usize>> = Vec::with_capacity(k);
    for _ in 0..k {
        for _ in 0..=config.max_rejects {
            let members = size.sample(rng) as usize;
            if members < 2 {
                continue;
            }
            let mut column = index::sample(rng, config.n, members).into_vec();
            column.sort_unstable();
            if seen.insert(column.clone()) {
                cliques.push(column);
                break;
            }
        }
    }
    CliqueBasis::from_canonical(cliques)
}

/// One Poisson draw per pair with positive rate; zero counts are not stored.
pub fn sample_network<T: Scalar>(model: &GraphletModel<T>, seed: u64) -> WeightedNetwork {
    sample_network_with(model, seed, Link::Poisson)
}

pub fn sample_network_with<T: Scalar>(model: &GraphletModel<T>, seed: u64, link: Link) -> WeightedNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for (u, v, rate) in model.rate_matrix().positive_entries() {
        let rate = rate.to_f64().expect("finite rate");
        let count = match link {
            Link::Poisson => Poisson::new(rate).expect("positive rate").sample(&mut rng) as u64,
            Link::ZeroTruncated => zero_truncated_poisson(rate, &mut rng),
        };
        if count > 0 {
            edges.push((u, v, count));
        }
    }
    WeightedNetwork::from_edges(model.node_count(), edges).expect("pairs come from a valid model")
}

fn zero_truncated_poisson<R: Rng>(rate: f64, rng: &mut R) -> u64 {
    if rate > 10.0 {
        let poisson = Poisson::new(rate).expect("positive rate");
        loop {
            let k = poisson.sample(rng) as u64;
            if k > 0 {
                return k;
            }
        }
    }
    // Inversion on the conditional distribution; the loop is short for small rates.
    let mut u: f64 = rng.random::<f64>() * -(-rate).exp_m1();
    let mut k = 1u64;
    let mut p = rate * (-rate).exp();
    while u > p {
        u -= p;
        k += 1;
        p *= rate / k as f64;
        if p == 0.0 {
            break;
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SynthConfig::default().validate().is_ok());
        for bad in [
            SynthConfig { n: 1, ..Default::default() },
            SynthConfig { lambda_k: 0.0, ..Default::default() },
            SynthConfig { gamma_shape: -1.0, ..Default::default() },
            SynthConfig { gamma_scale: 0.0, ..Default::default() },
            SynthConfig { bernoulli_p: 1.0, ..Default::default() },
            SynthConfig { bernoulli_p: 0.0, ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(GraphletError::InvalidConfig(_))));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let config = SynthConfig { seed: 7, ..Default::default() };
        let a = sample_model::<f64>(&config).unwrap();
        assert_eq!(a, sample_model::<f64>(&config).unwrap());
        assert_eq!(sample_network(&a, 3), sample_network(&a, 3));
        let other = sample_model::<f64>(&SynthConfig { seed: 8, ..config }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn near_certain_membership_collapses_to_one_clique() {
        let config = SynthConfig { n: 4, lambda_k: 5.0, bernoulli_p: 1.0 - 1e-12, max_rejects: 50, ..Default::default() };
        let m = sample_model::<f64>(&config).unwrap();
        assert_eq!(m.basis().cliques(), &[vec![0, 1, 2, 3]]);
    }

    #[test]
    fn columns_have_two_members_and_are_distinct() {
        for seed in 0..20 {
            let m = sample_model::<f64>(&SynthConfig { seed, ..Default::default() }).unwrap();
            assert!(m.basis().cliques().iter().all(|c| c.len() >= 2));
            assert!(m.mu().iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn clique_count_mean_matches_rate() {
        // Every default-config draw keeps all K columns, so the basis size is the Poisson draw.
        let total: usize = (0..100)
            .map(|seed| sample_model::<f64>(&SynthConfig { seed, ..Default::default() }).unwrap().len())
            .sum();
        let mean = total as f64 / 100.0;
        assert!((mean - 30.0).abs() <= 3.0 * (30.0f64 / 100.0).sqrt(), "mean K = {mean}");
    }

    #[test]
    fn nonexpandable_rejection() {
        let config = SynthConfig { n: 20, lambda_k: 5.0, bernoulli_p: 0.15, require_nonexpandable: true, seed: 5, ..Default::default() };
        let m = sample_model::<f64>(&config).unwrap();
        assert!(is_non_expandable(m.basis()).is_strict());

        let impossible = SynthConfig { n: 3, lambda_k: 40.0, bernoulli_p: 0.9, require_nonexpandable: true, max_rejects: 20, ..Default::default() };
        assert_eq!(sample_model::<f64>(&impossible), Err(GraphletError::RejectionCap(20)));
    }

    #[test]
    fn column_sizes_follow_conditioned_binomial() {
        // E[X | X >= 2] for X ~ Binomial(20, 0.15), from the probability mass function.
        let (n, p) = (20usize, 0.15f64);
        let pmf = |x: usize| {
            let choose = (0..x).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
            choose * p.powi(x as i32) * (1.0 - p).powi((n - x) as i32)
        };
        let tail: f64 = (2..=n).map(pmf).sum();
        let expected = (2..=n).map(|x| x as f64 * pmf(x)).sum::<f64>() / tail;
        let config = SynthConfig { n, bernoulli_p: p, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (mut total, mut count, mut node_hits) = (0usize, 0usize, vec![0usize; n]);
        for _ in 0..4000 {
            // One column per draw keeps the duplicate rule out of the picture.
            for c in draw_columns(&config, 1, &mut rng).cliques() {
                total += c.len();
                count += 1;
                c.iter().for_each(|&v| node_hits[v] += 1);
            }
        }
        let mean = total as f64 / count as f64;
        assert!((mean - expected).abs() < 0.09, "mean size {mean} vs {expected}");
        // Members are uniform over nodes.
        let per_node = total as f64 / n as f64;
        assert!(node_hits.iter().all(|&h| (h as f64 - per_node).abs() < 5.0 * per_node.sqrt()));
    }

    #[test]
    fn empty_model_gives_empty_network() {
        let m = GraphletModel::<f64>::new(5, CliqueBasis::empty(), vec![]).unwrap();
        assert_eq!(sample_network(&m, 1).edge_count(), 0);
    }

    #[test]
    fn heavy_clique_weights_concentrate() {
        let m = GraphletModel::new(3, CliqueBasis::new(vec![vec![0, 1, 2]]).unwrap(), vec![1000.0]).unwrap();
        let y = sample_network(&m, 11);
        assert_eq!(y.edge_count(), 3);
        let mean = y.edges().iter().map(|e| e.2 as f64).sum::<f64>() / 3.0;
        assert!((mean - 1000.0).abs() <= 3.0 * (1000.0f64 / 3.0).sqrt(), "mean = {mean}");
    }

    #[test]
    fn support_is_within_generating_cliques() {
        for seed in 0..20 {
            let m = sample_model::<f64>(&SynthConfig { seed, ..Default::default() }).unwrap();
            let lambda = m.rate_matrix();
            for &(u, v, _) in sample_network(&m, seed).edges() {
                assert!(lambda.get(u, v) > 0.0);
            }
        }
    }

    #[test]
    fn edge_means_converge_to_rates() {
        let m = GraphletModel::new(
            4,
            CliqueBasis::new(vec![vec![0, 1, 2], vec![2, 3]]).unwrap(),
            vec![0.7, 2.5],
        )
        .unwrap();
        let draws = 4000;
        let mut sums = std::collections::BTreeMap::new();
        for seed in 0..draws {
            for &(u, v, w) in sample_network(&m, seed).edges() {
                *sums.entry((u, v)).or_insert(0u64) += w;
            }
        }
        for (u, v, rate) in m.rate_matrix().entries() {
            let mean = sums.get(&(u, v)).copied().unwrap_or(0) as f64 / draws as f64;
            assert!((mean - rate).abs() <= 3.0 * (rate / draws as f64).sqrt(), "({u},{v}) mean {mean} rate {rate}");
        }
    }

    #[test]
    fn zero_truncated_link_covers_support() {
        let m = GraphletModel::new(
            5,
            CliqueBasis::new(vec![vec![0, 1, 2], vec![2, 3, 4]]).unwrap(),
            vec![0.05, 30.0],
        )
        .unwrap();
        for seed in 0..50 {
            let y = sample_network_with(&m, seed, Link::ZeroTruncated);
            assert_eq!(y.edge_count(), 6);
        }
    }

    #[test]
    fn zero_truncated_mean() {
        // E[X | X >= 1] = λ / (1 - e^-λ).
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for rate in [0.1, 1.0, 4.0] {
            let n = 200_000;
            let draws: Vec<f64> = (0..n).map(|_| zero_truncated_poisson(rate, &mut rng) as f64).collect();
            let mean = draws.iter().sum::<f64>() / n as f64;
            let expected = rate / -(-rate).exp_m1();
            let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
            assert!((mean - expected).abs() <= 4.0 * (var / n as f64).sqrt(), "rate {rate}: {mean} vs {expected}");
        }
    }
}
