use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphletError {
    #[error("empty network")]
    EmptyNetwork,
    #[error("no positive edges")]
    NoPositiveEdges,
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("zero weight on edge ({0},{1})")]
    ZeroWeight(usize, usize),
    #[error("node index {index} out of range for {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("invalid clique {0:?}: {1}")]
    InvalidClique(Vec<usize>, &'static str),
    #[error("duplicate clique {0:?}")]
    DuplicateClique(Vec<usize>),
    #[error("coefficient vector has length {got}, basis has {expected} cliques")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid coefficient {0}")]
    InvalidCoefficient(f64),
    #[error("power {0} outside supported range 1..={1}")]
    PowerOutOfRange(u32, u32),
    #[error("weight overflow while raising network to a power")]
    WeightOverflow,
    #[error("basis is expandable (witness {0:?})")]
    Expandable(Vec<usize>),
    #[error("no unique edge for clique {0}")]
    NoUniqueEdge(usize),
    #[error("negative residual {value} at edge ({i},{j})")]
    NegativeResidual { i: usize, j: usize, value: f64 },
    #[error("iteration cap exceeded after {0} rounds")]
    IterationCap(usize),
    #[error("uncovered positive edge ({0},{1})")]
    UncoveredEdge(usize, usize),
    #[error("zero denominator at covered edge ({0},{1})")]
    ZeroDenominator(usize, usize),
    #[error("all coefficients pruned")]
    AllPruned,
    #[error("retained count {k_tilde} out of range 0..={k}")]
    CountOutOfRange { k_tilde: usize, k: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("rejection cap exceeded after {0} attempts")]
    RejectionCap(usize),
    #[error("zero normalizer: {0}")]
    ZeroNormalizer(&'static str),
    #[error("node universe mismatch: {0}")]
    NodeMismatch(String),
    #[error("shape parameter {0} is not a positive integer; use the Monte-Carlo estimator")]
    NonIntegerShape(f64),
    #[error("probability {0} outside [0,1]")]
    ProbabilityOutOfRange(f64),
}

pub type Result<T, E = GraphletError> = std::result::Result<T, E>;
