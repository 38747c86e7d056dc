//! Graphlet decomposition of integer-weighted undirected networks.
//!
//! A network `Y` is modeled as Poisson counts with rate matrix `Λ = Σ_k μ_k P_k`,
//! where each `P_k` is the complete graph on a clique of nodes. Decomposition runs
//! in two stages: a threshold sweep collects candidate cliques, then an EM
//! (Richardson-Lucy) iteration estimates their coefficients, most of which vanish.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases below fix
//! `f64`, which all tolerances in the test suites assume.

pub mod cliques;
pub mod em;
pub mod error;
pub mod eval;
pub mod model;
pub mod network;
pub mod scalar;
pub mod synth;
pub mod theory;

pub use cliques::{
    candidate_basis, candidate_basis_rates, exact_decompose, is_non_expandable, maximal_cliques,
    unique_edge_witnesses, BinaryGraph, ThresholdSweepReport,
};
pub use em::{fit, prune, truncate_to_accuracy, truncate_to_count, EmConfig};
pub use error::{GraphletError, Result};
pub use model::{CliqueBasis, GraphletModel, RateMatrix};
pub use network::WeightedNetwork;
pub use scalar::Scalar;

pub type Model = model::GraphletModel<f64>;
pub type Rates = model::RateMatrix<f64>;
pub type Config = em::EmConfig<f64>;
pub type FitResult = em::EmResult<f64>;
pub type Approximation = em::ApproximateModel<f64>;

pub type ModelF32 = model::GraphletModel<f32>;
pub type RatesF32 = model::RateMatrix<f32>;
