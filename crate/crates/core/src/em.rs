//! Coefficient estimation by EM (Richardson-Lucy Poisson deconvolution), pruning of
//! vanishing coefficients and truncation to a target accuracy.
//!
//! Sums over pairs run over ordered pairs, so every stored undirected edge counts
//! twice and a clique of size `a` has `T = a (a - 1)` pairs. The E-step
//! responsibilities are never materialized: each observed edge distributes
//! `y / λ` to the cliques that cover it, and the M-step rescales.

use std::collections::HashMap;

use crate::error::{GraphletError, Result};
use crate::model::{clique_pairs, CliqueBasis, GraphletModel, RateMatrix};
use crate::network::WeightedNetwork;
use crate::scalar::{CompensatedSum, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct EmConfig<T> {
    /// Stop once `||μ⁺ - μ||₂ / ||μ||₂` falls to this value.
    pub epsilon: T,
    pub max_iters: usize,
    /// Coefficients with `μ_k T_k` below this fraction of the total weight are zeroed.
    pub prune_fraction: T,
    pub refit_after_prune: bool,
}

impl<T: Scalar> Default for EmConfig<T> {
    fn default() -> Self {
        Self {
            epsilon: T::lit(1e-8),
            max_iters: 10_000,
            prune_fraction: T::lit(1e-6),
            refit_after_prune: true,
        }
    }
}

impl<T: Scalar> EmConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > T::zero()) {
            return Err(GraphletError::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(GraphletError::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.prune_fraction >= T::zero() && self.prune_fraction < T::one()) {
            return Err(GraphletError::InvalidConfig(format!(
                "prune_fraction must lie in [0,1), got {}",
                self.prune_fraction
            )));
        }
        Ok(())
    }
}

/// Anything that can serve as the observed network.
pub trait Observations<T> {
    fn node_count(&self) -> usize;
    /// Positive unordered entries `(u, v, y)`, `u < v`.
    fn positive_observations(&self) -> Vec<(usize, usize, T)>;
}

impl<T: Scalar> Observations<T> for WeightedNetwork {
    fn node_count(&self) -> usize {
        WeightedNetwork::node_count(self)
    }

    fn positive_observations(&self) -> Vec<(usize, usize, T)> {
        self.edges().iter().map(|&(u, v, w)| (u, v, T::from_count(w))).collect()
    }
}

impl<T: Scalar> Observations<T> for RateMatrix<T> {
    fn node_count(&self) -> usize {
        RateMatrix::node_count(self)
    }

    fn positive_observations(&self) -> Vec<(usize, usize, T)> {
        self.positive_entries().collect()
    }
}

/// Iteration state.
#[derive(Debug, Clone, PartialEq)]
pub struct EmState<T> {
    pub mu: Vec<T>,
    /// Ordered-pair count `a_k (a_k - 1)` per clique.
    pub t_k: Vec<T>,
    pub iteration: usize,
    /// Log-likelihood at the initial point and after every step.
    pub loglik_trace: Vec<T>,
    /// `Σ_k μ_k T_k` at the initial point and after every step.
    pub mass_trace: Vec<T>,
    /// Rate `λ_e` at `mu` for every fitted edge.
    pub lambda: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmResult<T> {
    /// Coefficients over the full basis, zeros retained.
    pub model: GraphletModel<T>,
    pub converged: bool,
    pub iterations: usize,
    pub final_loglik: T,
    pub loglik_trace: Vec<T>,
    pub mass_trace: Vec<T>,
    /// Ordered-pair weight of the observations the fit used.
    pub total_weight: T,
}

/// Precomputed design: observed edges and, per edge, the cliques covering it (CSR).
#[derive(Debug, Clone)]
pub struct EmProblem<T> {
    n: usize,
    basis: CliqueBasis,
    y: Vec<T>,
    edges: Vec<(usize, usize)>,
    cover_start: Vec<usize>,
    cover: Vec<usize>,
    t_k: Vec<T>,
    total_weight: T,
}

impl<T: Scalar> EmProblem<T> {
    /// Fails with [`GraphletError::UncoveredEdge`] if some positive entry lies in no clique.
    pub fn new<Y: Observations<T> + ?Sized>(y: &Y, basis: &CliqueBasis) -> Result<Self> {
        Self::build(y, basis, true)
    }

    /// Like [`EmProblem::new`] but silently leaves uncovered entries out of the fit.
    pub fn covered_only<Y: Observations<T> + ?Sized>(y: &Y, basis: &CliqueBasis) -> Result<Self> {
        Self::build(y, basis, false)
    }

    fn build<Y: Observations<T> + ?Sized>(y: &Y, basis: &CliqueBasis, strict: bool) -> Result<Self> {
        let n = y.node_count();
        if basis.min_node_count() > n {
            return Err(GraphletError::NodeOutOfRange { index: basis.min_node_count() - 1, n });
        }
        let obs = y.positive_observations();
        if obs.is_empty() {
            return Err(GraphletError::NoPositiveEdges);
        }
        let index: HashMap<(usize, usize), usize> =
            obs.iter().enumerate().map(|(i, &(u, v, _))| ((u, v), i)).collect();
        let mut per_edge: Vec<Vec<usize>> = vec![Vec::new(); obs.len()];
        for (k, clique) in basis.cliques().iter().enumerate() {
            for pair in clique_pairs(clique) {
                if let Some(&e) = index.get(&pair) {
                    per_edge[e].push(k);
                }
            }
        }
        let mut edges = Vec::with_capacity(obs.len());
        let mut weights = Vec::with_capacity(obs.len());
        let mut cover_start = vec![0];
        let mut cover = Vec::new();
        for (&(u, v, w), covering) in obs.iter().zip(per_edge) {
            if covering.is_empty() {
                if strict {
                    return Err(GraphletError::UncoveredEdge(u, v));
                }
                continue;
            }
            edges.push((u, v));
            weights.push(w);
            cover.extend(covering);
            cover_start.push(cover.len());
        }
        if edges.is_empty() {
            return Err(GraphletError::NoPositiveEdges);
        }
        let total_weight = weights.iter().copied().collect::<CompensatedSum<T>>().value() * T::lit(2.0);
        let t_k = (0..basis.len()).map(|k| T::from_usize(basis.ordered_pairs(k)).unwrap()).collect();
        Ok(Self { n, basis: basis.clone(), y: weights, edges, cover_start, cover, t_k, total_weight })
    }

    pub fn total_weight(&self) -> T {
        self.total_weight
    }

    pub fn basis(&self) -> &CliqueBasis {
        &self.basis
    }

    fn covering(&self, e: usize) -> &[usize] {
        &self.cover[self.cover_start[e]..self.cover_start[e + 1]]
    }

    /// Uniform start `μ_k = W / Σ_m T_m`, which already conserves mass.
    pub fn initial_state(&self) -> EmState<T> {
        let t_sum: T = self.t_k.iter().copied().sum();
        let mu = vec![self.total_weight / t_sum; self.t_k.len()];
        self.state_from(mu)
    }

    /// A state at arbitrary nonnegative coefficients.
    pub fn state_from(&self, mu: Vec<T>) -> EmState<T> {
        assert_eq!(mu.len(), self.t_k.len(), "coefficient vector length");
        let lambda = self.rates(&mu);
        let loglik = self.log_likelihood_at(&lambda).map(|l| l - self.mass(&mu)).unwrap_or(T::neg_infinity());
        let mass = self.mass(&mu);
        EmState {
            mu,
            t_k: self.t_k.clone(),
            iteration: 0,
            loglik_trace: vec![loglik],
            mass_trace: vec![mass],
            lambda,
        }
    }

    fn mass(&self, mu: &[T]) -> T {
        mu.iter().zip(&self.t_k).map(|(&m, &t)| m * t).collect::<CompensatedSum<T>>().value()
    }

    fn rates(&self, mu: &[T]) -> Vec<T> {
        (0..self.edges.len()).map(|e| self.covering(e).iter().map(|&k| mu[k]).sum()).collect()
    }

    /// `2 Σ_e y_e ln λ_e`; fails on a nonpositive rate.
    fn log_likelihood_at(&self, lambda: &[T]) -> Result<T> {
        let mut acc = CompensatedSum::new();
        for (e, &l) in lambda.iter().enumerate() {
            if !(l > T::zero()) {
                let (u, v) = self.edges[e];
                return Err(GraphletError::UncoveredEdge(u, v));
            }
            acc.add(self.y[e] * l.ln());
        }
        Ok(acc.value() * T::lit(2.0))
    }

    /// `Σ_{ij: λ>0} (Y log λ − λ)` over ordered pairs, constants dropped.
    pub fn log_likelihood(&self, mu: &[T]) -> Result<T> {
        Ok(self.log_likelihood_at(&self.rates(mu))? - self.mass(mu))
    }

    /// One E+M update over all observed edges.
    pub fn step(&self, state: &mut EmState<T>) -> Result<()> {
        let mut ratio_sum = vec![T::zero(); state.mu.len()];
        for (e, &lambda) in state.lambda.iter().enumerate() {
            if !(lambda > T::zero()) {
                let (u, v) = self.edges[e];
                return Err(GraphletError::ZeroDenominator(u, v));
            }
            let r = self.y[e] / lambda;
            for &k in self.covering(e) {
                ratio_sum[k] += r;
            }
        }
        let two = T::lit(2.0);
        for ((m, &s), &t) in state.mu.iter_mut().zip(&ratio_sum).zip(&self.t_k) {
            *m = *m * two * s / t;
        }
        state.iteration += 1;
        let mut acc = CompensatedSum::new();
        for e in 0..self.edges.len() {
            let lambda: T = self.covering(e).iter().map(|&k| state.mu[k]).sum();
            state.lambda[e] = lambda;
            if lambda > T::zero() {
                acc.add(self.y[e] * lambda.ln());
            } else {
                let (u, v) = self.edges[e];
                return Err(GraphletError::UncoveredEdge(u, v));
            }
        }
        let mass = self.mass(&state.mu);
        state.loglik_trace.push(acc.value() * two - mass);
        state.mass_trace.push(mass);
        Ok(())
    }

    /// Iterates from the uniform start until the relative change drops to `epsilon`.
    pub fn run(&self, config: &EmConfig<T>) -> Result<EmResult<T>> {
        config.validate()?;
        let mut state = self.initial_state();
        let tiny = T::min_positive_value();
        let mut converged = false;
        while state.iteration < config.max_iters {
            let before = state.mu.clone();
            self.step(&mut state)?;
            let diff = l2(before.iter().zip(&state.mu).map(|(&a, &b)| a - b));
            let norm = l2(before.iter().copied()).max(tiny);
            if diff / norm <= config.epsilon {
                converged = true;
                break;
            }
        }
        Ok(EmResult {
            model: GraphletModel::new(self.n, self.basis.clone(), state.mu)?,
            converged,
            iterations: state.iteration,
            final_loglik: *state.loglik_trace.last().unwrap(),
            loglik_trace: state.loglik_trace,
            mass_trace: state.mass_trace,
            total_weight: self.total_weight,
        })
    }
}

fn l2<T: Scalar>(values: impl Iterator<Item = T>) -> T {
    values.map(|v| v * v).sum::<T>().sqrt()
}

/// Estimates coefficients for every clique of `basis`.
pub fn fit<T: Scalar, Y: Observations<T> + ?Sized>(
    y: &Y,
    basis: &CliqueBasis,
    config: &EmConfig<T>,
) -> Result<EmResult<T>> {
    config.validate()?;
    EmProblem::new(y, basis)?.run(config)
}

/// One E+M step from `state`.
pub fn em_step<T: Scalar, Y: Observations<T> + ?Sized>(
    y: &Y,
    basis: &CliqueBasis,
    mut state: EmState<T>,
) -> Result<EmState<T>> {
    EmProblem::new(y, basis)?.step(&mut state)?;
    Ok(state)
}

/// Poisson log-likelihood of `y` under `model`, over pairs with positive rate.
pub fn log_likelihood<T: Scalar, Y: Observations<T> + ?Sized>(y: &Y, model: &GraphletModel<T>) -> Result<T> {
    let live = model.reduced();
    if live.is_empty() {
        return match y.positive_observations().first() {
            Some(&(u, v, _)) => Err(GraphletError::UncoveredEdge(u, v)),
            None => Ok(T::zero()),
        };
    }
    EmProblem::new(y, live.basis())?.log_likelihood(live.mu())
}

/// Outcome of [`prune`].
#[derive(Debug, Clone, PartialEq)]
pub struct Pruned<T> {
    /// Reduced model: every coefficient strictly positive.
    pub model: GraphletModel<T>,
    /// The refit on the surviving cliques, when one ran.
    pub refit: Option<EmResult<T>>,
}

impl<T: Scalar> Pruned<T> {
    /// Estimated basis count.
    pub fn k_hat(&self) -> usize {
        self.model.basis().len()
    }
}

/// Zeroes coefficients whose mass `μ_k T_k` is below `prune_fraction` of the total
/// weight, drops them, and optionally refits on the survivors.
///
/// Observed entries left uncovered by the survivors are excluded from the refit.
pub fn prune<T: Scalar, Y: Observations<T> + ?Sized>(
    y: &Y,
    result: &EmResult<T>,
    config: &EmConfig<T>,
) -> Result<Pruned<T>> {
    config.validate()?;
    let model = &result.model;
    let threshold = config.prune_fraction * result.total_weight;
    let basis = model.basis();
    let survivors = model.select(|k| {
        let m = model.mu()[k];
        m > T::zero() && m * T::from_usize(basis.ordered_pairs(k)).unwrap() >= threshold
    });
    if survivors.is_empty() {
        return Err(GraphletError::AllPruned);
    }
    if !config.refit_after_prune {
        return Ok(Pruned { model: survivors, refit: None });
    }
    let refit = EmProblem::covered_only(y, survivors.basis())?.run(config)?;
    let model = refit.model.reduced();
    if model.is_empty() {
        return Err(GraphletError::AllPruned);
    }
    Ok(Pruned { model, refit: Some(refit) })
}

/// A model truncated to its heaviest cliques.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximateModel<T> {
    /// Retained cliques in rank order.
    pub model: GraphletModel<T>,
    /// Parent indices of the retained cliques, in rank order.
    pub retained: Vec<usize>,
    /// Parent indices of the excluded cliques, ascending.
    pub excluded: Vec<usize>,
    pub k_tilde: usize,
    /// `τ(retained) / τ(full)`.
    pub achieved_accuracy: T,
    /// `Σ_{k excluded} μ_k a_k / τ(full)`.
    pub excluded_fraction: T,
}

/// Clique order by tau mass `μ_k a_k` descending; ties prefer larger cliques, then
/// lexicographic clique order.
pub fn rank_by_tau_mass<T: Scalar>(model: &GraphletModel<T>) -> Vec<usize> {
    let masses = model.tau_masses();
    let basis = model.basis();
    let mut order: Vec<usize> = (0..model.len()).collect();
    order.sort_by(|&a, &b| {
        masses[b]
            .partial_cmp(&masses[a])
            .expect("finite masses")
            .then_with(|| basis.clique_size(b).cmp(&basis.clique_size(a)))
            .then_with(|| basis.clique(a).cmp(basis.clique(b)))
    });
    order
}

fn truncate<T: Scalar>(model: &GraphletModel<T>, order: &[usize], keep: usize, prefix: &[T]) -> ApproximateModel<T> {
    let total = *prefix.last().unwrap_or(&T::zero());
    let masses = model.tau_masses();
    let excluded_mass: T = order[keep..].iter().map(|&k| masses[k]).sum();
    let (achieved, excluded_fraction) = if total > T::zero() {
        (prefix[keep] / total, excluded_mass / total)
    } else {
        (T::one(), T::zero())
    };
    let retained = order[..keep].to_vec();
    let mut excluded = order[keep..].to_vec();
    excluded.sort_unstable();
    let kept_basis = CliqueBasis::from_canonical(retained.iter().map(|&k| model.basis().clique(k).to_vec()).collect());
    let kept_mu = retained.iter().map(|&k| model.mu()[k]).collect();
    ApproximateModel {
        model: GraphletModel::new(model.node_count(), kept_basis, kept_mu).expect("subset of a valid model"),
        retained,
        excluded,
        k_tilde: keep,
        achieved_accuracy: achieved,
        excluded_fraction,
    }
}

/// Prefix sums of tau mass in rank order; `prefix[i]` is the mass of the first `i`.
fn ranked_prefix<T: Scalar>(model: &GraphletModel<T>) -> (Vec<usize>, Vec<T>) {
    let order = rank_by_tau_mass(model);
    let masses = model.tau_masses();
    let mut prefix = Vec::with_capacity(order.len() + 1);
    let mut acc = T::zero();
    prefix.push(acc);
    for &k in &order {
        acc += masses[k];
        prefix.push(acc);
    }
    (order, prefix)
}

/// Keeps the shortest rank prefix whose tau-mass fraction reaches `target`.
pub fn truncate_to_accuracy<T: Scalar>(model: &GraphletModel<T>, target: T) -> Result<ApproximateModel<T>> {
    if !(target >= T::zero() && target <= T::one()) {
        return Err(GraphletError::InvalidConfig(format!("target accuracy {target} outside [0,1]")));
    }
    let (order, prefix) = ranked_prefix(model);
    let total = *prefix.last().unwrap();
    let keep = if total > T::zero() {
        (0..=order.len()).find(|&i| prefix[i] / total >= target).unwrap_or(order.len())
    } else {
        0
    };
    Ok(truncate(model, &order, keep, &prefix))
}

/// Keeps exactly the `k_tilde` heaviest cliques.
pub fn truncate_to_count<T: Scalar>(model: &GraphletModel<T>, k_tilde: usize) -> Result<ApproximateModel<T>> {
    if k_tilde > model.len() {
        return Err(GraphletError::CountOutOfRange { k_tilde, k: model.len() });
    }
    let (order, prefix) = ranked_prefix(model);
    Ok(truncate(model, &order, k_tilde, &prefix))
}
