//! Candidate-count and redundancy bounds, and the expected accuracy of the best
//! `K̃`-term approximation when clique masses are iid `Gamma(α, 1)`.
//!
//! Expected order statistics of integer-shape Gamma variables are computed exactly in
//! rational arithmetic. The alternating binomial sums involved cancel catastrophically
//! in floating point once `K` reaches a few dozen.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::error::{GraphletError, Result};

/// Entropy in bits of a Bernoulli(p) variable.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphletError::ProbabilityOutOfRange(p));
    }
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    Ok(term(p) + term(1.0 - p))
}

/// Asymptotic bound on the number of candidate cliques: `Q · (2^{K·H(p)} + K)`.
pub fn candidate_count_bound(k: usize, p: f64, q: f64) -> Result<f64> {
    let h = binary_entropy(p)?;
    Ok(q * ((k as f64 * h).exp2() + k as f64))
}

/// Redundancy bound `Q · (1 + N^{c·H(p)} / (c · log₂ N))`.
pub fn redundancy_bound(n: usize, p: f64, c: f64, q: f64) -> Result<f64> {
    if n < 2 {
        return Err(GraphletError::InvalidConfig(format!("n must be at least 2, got {n}")));
    }
    if !(c > 0.0) {
        return Err(GraphletError::InvalidConfig(format!("c must be positive, got {c}")));
    }
    let h = binary_entropy(p)?;
    let n = n as f64;
    Ok(q * (1.0 + n.powf(c * h) / (c * n.log2())))
}

fn integer_shape(alpha: f64) -> Result<u32> {
    if alpha >= 1.0 && alpha.fract() == 0.0 && alpha <= u32::MAX as f64 {
        Ok(alpha as u32)
    } else {
        Err(GraphletError::NonIntegerShape(alpha))
    }
}

fn int(v: usize) -> BigInt {
    BigInt::from(v)
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * int(n - i) / int(i + 1))
}

/// `E[min of m iid Gamma(α,1)]` for `m = 1..=k`.
///
/// The survival function of the minimum is `e^{-mx} (Σ_{i<α} x^i/i!)^m`; integrating
/// term by term gives `Σ_q c_q q! / m^{q+1}` with `c_q` the coefficients of the power.
fn expected_minima(k: usize, alpha: u32) -> Vec<BigRational> {
    let alpha = alpha as usize;
    let mut factorial = vec![BigInt::one()];
    for i in 1..=(alpha - 1) * k {
        let next = &factorial[i - 1] * int(i);
        factorial.push(next);
    }
    let base: Vec<BigRational> =
        (0..alpha).map(|i| BigRational::new(BigInt::one(), factorial[i].clone())).collect();
    let mut power = vec![BigRational::one()];
    let mut minima = Vec::with_capacity(k);
    for m in 1..=k {
        let mut next = vec![BigRational::zero(); power.len() + alpha - 1];
        for (a, ca) in power.iter().enumerate() {
            for (b, cb) in base.iter().enumerate() {
                next[a + b] += ca * cb;
            }
        }
        power = next;
        let mut m_pow = int(m);
        let mut total = BigRational::zero();
        for (q, c) in power.iter().enumerate() {
            total += c * BigRational::new(factorial[q].clone(), m_pow.clone());
            m_pow *= int(m);
        }
        minima.push(total);
    }
    minima
}

/// Exact expected order statistics of `k` iid `Gamma(α,1)` variables, largest first.
fn order_statistic_means_exact(k: usize, alpha: u32) -> Vec<BigRational> {
    let minima = expected_minima(k, alpha);
    // r-th smallest: Σ_{m=k-r+1}^{k} (-1)^{m-k+r-1} C(m-1, k-r) C(k, m) E[min of m].
    (1..=k)
        .map(|j| {
            let r = k - j + 1;
            let mut total = BigRational::zero();
            for m in (k - r + 1)..=k {
                let term = BigRational::from_integer(binomial(m - 1, k - r) * binomial(k, m)) * &minima[m - 1];
                if (m + r - k - 1) % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
            total
        })
        .collect()
}

/// `f(j, K, α)` for `j = 1..=K`: the expected `j`-th largest of `K` iid `Gamma(α,1)`
/// masses. Requires integer `α`.
pub fn order_statistic_means(k: usize, alpha: f64) -> Result<Vec<f64>> {
    let alpha = integer_shape(alpha)?;
    Ok(order_statistic_means_exact(k, alpha).iter().map(to_f64).collect())
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("finite rational")
}

/// Exact accuracy values `τ₀(K̃)` for `K̃ = 0..=K`.
fn accuracy_values(k: usize, alpha: u32) -> Vec<f64> {
    let means = order_statistic_means_exact(k, alpha);
    let total = BigRational::from_integer(int(k) * int(alpha as usize));
    let mut partial = BigRational::zero();
    let mut out = vec![0.0];
    for f in &means {
        partial += f;
        out.push(to_f64(&(&partial / &total)).clamp(0.0, 1.0));
    }
    out
}

fn check_counts(k_tilde: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(GraphletError::InvalidConfig("K must be at least 1".into()));
    }
    if k_tilde > k {
        return Err(GraphletError::CountOutOfRange { k_tilde, k });
    }
    Ok(())
}

/// Expected share of total mass held by the `K̃` largest of `K` iid `Gamma(α,1)` masses,
/// as the ratio of expectations `Σ_{j≤K̃} f(j,K,α) / (αK)`. Requires integer `α`;
/// use [`expected_accuracy_mc`] otherwise.
pub fn expected_accuracy(k_tilde: usize, k: usize, alpha: f64) -> Result<f64> {
    check_counts(k_tilde, k)?;
    let alpha = integer_shape(alpha)?;
    Ok(accuracy_values(k, alpha)[k_tilde])
}

/// Monte-Carlo estimate of one accuracy point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Mean of the per-replicate share `Σ top-K̃ / Σ all`.
    pub ratio_mean: f64,
    pub ratio_std_error: f64,
    /// `mean(Σ top-K̃) / mean(Σ all)`, the quantity the closed form computes.
    pub expectation_ratio: f64,
    /// Delta-method standard error of `expectation_ratio`.
    pub expectation_std_error: f64,
}

/// Replicates per independently seeded stream.
const CHUNK: usize = 10_000;

#[derive(Clone)]
struct Moments {
    ratio: Vec<f64>,
    ratio_sq: Vec<f64>,
    top: Vec<f64>,
    top_sq: Vec<f64>,
    top_total: Vec<f64>,
    total: f64,
    total_sq: f64,
}

impl Moments {
    fn new(k: usize) -> Self {
        let z = vec![0.0; k + 1];
        Self {
            ratio: z.clone(),
            ratio_sq: z.clone(),
            top: z.clone(),
            top_sq: z.clone(),
            top_total: z,
            total: 0.0,
            total_sq: 0.0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in [
            (&mut self.ratio, &other.ratio),
            (&mut self.ratio_sq, &other.ratio_sq),
            (&mut self.top, &other.top),
            (&mut self.top_sq, &other.top_sq),
            (&mut self.top_total, &other.top_total),
        ] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        self.total += other.total;
        self.total_sq += other.total_sq;
        self
    }
}

/// Monte-Carlo estimates of `τ₀(K̃)` for every `K̃ = 0..=K`.
///
/// Each replicate draws `K` iid `Gamma(α,1)` masses and sorts them in descending
/// order. Replicates are split into chunks with their own stream of a generator seeded
/// by `seed`, so results do not depend on the thread count.
pub fn accuracy_curve_mc(k: usize, alpha: f64, samples: usize, seed: u64) -> Result<Vec<McEstimate>> {
    check_counts(0, k)?;
    if samples < 2 {
        return Err(GraphletError::InvalidConfig(format!("need at least 2 samples, got {samples}")));
    }
    let gamma = Gamma::new(alpha, 1.0).map_err(|e| GraphletError::InvalidConfig(e.to_string()))?;
    let chunks = samples.div_ceil(CHUNK);
    let moments = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let reps = CHUNK.min(samples - c * CHUNK);
            let mut acc = Moments::new(k);
            let mut masses = vec![0.0f64; k];
            for _ in 0..reps {
                masses.iter_mut().for_each(|m| *m = gamma.sample(&mut rng));
                masses.sort_unstable_by(|a, b| b.total_cmp(a));
                let total: f64 = masses.iter().sum();
                acc.total += total;
                acc.total_sq += total * total;
                let mut top = 0.0;
                for j in 0..=k {
                    if j > 0 {
                        top += masses[j - 1];
                    }
                    // The last point is exactly one by construction.
                    let top_j = if j == k { total } else { top };
                    let ratio = top_j / total;
                    acc.ratio[j] += ratio;
                    acc.ratio_sq[j] += ratio * ratio;
                    acc.top[j] += top_j;
                    acc.top_sq[j] += top_j * top_j;
                    acc.top_total[j] += top_j * total;
                }
            }
            acc
        })
        .reduce(|| Moments::new(k), Moments::merge);

    let n = samples as f64;
    let mean_total = moments.total / n;
    let var_total = (moments.total_sq / n - mean_total * mean_total).max(0.0);
    Ok((0..=k)
        .map(|j| {
            let ratio_mean = moments.ratio[j] / n;
            let ratio_var = (moments.ratio_sq[j] / n - ratio_mean * ratio_mean).max(0.0) * n / (n - 1.0);
            let mean_top = moments.top[j] / n;
            let r = mean_top / mean_total;
            let var_top = (moments.top_sq[j] / n - mean_top * mean_top).max(0.0);
            let cov = moments.top_total[j] / n - mean_top * mean_total;
            let delta_var = ((var_top - 2.0 * r * cov + r * r * var_total) / (n - 1.0)).max(0.0);
            let exact_endpoint = j == 0 || j == k;
            McEstimate {
                ratio_mean,
                ratio_std_error: if exact_endpoint { 0.0 } else { (ratio_var / n).sqrt() },
                expectation_ratio: r,
                expectation_std_error: if exact_endpoint { 0.0 } else { delta_var.sqrt() / mean_total },
            }
        })
        .collect())
}

/// Monte-Carlo estimate of `τ₀(K̃, K, α)`; `α` may be any positive real.
pub fn expected_accuracy_mc(k_tilde: usize, k: usize, alpha: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    check_counts(k_tilde, k)?;
    Ok(accuracy_curve_mc(k, alpha, samples, seed)?[k_tilde])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveMethod {
    ClosedForm,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyCurve {
    pub k: usize,
    pub alpha: f64,
    /// `(K̃, τ₀)` for `K̃ = 0..=K`.
    pub points: Vec<(usize, f64)>,
    /// Present for Monte-Carlo curves.
    pub std_errors: Option<Vec<f64>>,
}

impl AccuracyCurve {
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# k={} alpha={}\n", self.k, self.alpha);
        match &self.std_errors {
            None => {
                out.push_str("k_tilde\ttau0\n");
                for &(k_tilde, tau) in &self.points {
                    out.push_str(&format!("{k_tilde}\t{tau:.6}\n"));
                }
            }
            Some(se) => {
                out.push_str("k_tilde\ttau0\tstd_error\n");
                for (&(k_tilde, tau), se) in self.points.iter().zip(se) {
                    out.push_str(&format!("{k_tilde}\t{tau:.6}\t{se:.6}\n"));
                }
            }
        }
        out
    }
}

/// `τ₀` at every `K̃ = 0..=K`. The Monte-Carlo curve reports the ratio-of-expectations
/// estimator so both methods estimate the same quantity.
pub fn accuracy_curve(k: usize, alpha: f64, method: CurveMethod) -> Result<AccuracyCurve> {
    check_counts(0, k)?;
    let (points, std_errors) = match method {
        CurveMethod::ClosedForm => {
            let values = accuracy_values(k, integer_shape(alpha)?);
            (values.into_iter().enumerate().collect(), None)
        }
        CurveMethod::MonteCarlo { samples, seed } => {
            let est = accuracy_curve_mc(k, alpha, samples, seed)?;
            let points = est.iter().enumerate().map(|(j, e)| (j, e.expectation_ratio)).collect();
            (points, Some(est.iter().map(|e| e.expectation_std_error).collect()))
        }
    };
    Ok(AccuracyCurve { k, alpha, points, std_errors })
}
