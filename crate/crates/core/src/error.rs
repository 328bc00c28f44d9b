use thiserror::Error;

/// Malformed or out-of-range input data.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("value out of range: {0}")]
    Range(String),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ColoringError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("no signature bucket reaches {threshold} colorings (largest has {largest})")]
    NoLargeBucket { largest: u64, threshold: u64 },
    #[error("no partial coloring with support >= {min_support} satisfies the row bounds")]
    NoValidColoring { min_support: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SdpError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("SDP feasibility solver did not converge after {sweeps} sweeps (max residual {residual:.3e})")]
    NotConverged { sweeps: usize, residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoundingError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("bit level {level}: backend failed after {retries} retries")]
    RetriesExhausted { level: u32, retries: u32 },
    #[error(
        "plane of {size} columns exceeds the exhaustive limit and the sdp fallback is disabled"
    )]
    PlaneTooLarge { size: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("covering iteration limit of {limit} oracle calls reached (best min coverage {best_coverage:.6})")]
    IterationLimit {
        limit: usize,
        best_coverage: f64,
        best: crate::covering::SparseSolution,
    },
    #[error("pattern LP search found no feasible budget up to r = {max_budget}")]
    NoFeasibleBudget { max_budget: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PackingError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
    #[error("prefix {{1..{prefix}}} has a slot deficit")]
    Deficit { prefix: usize },
    #[error("reserved space {available:.6} is below the small-item volume {required:.6}")]
    InsufficientSpace { available: f64, required: f64 },
}
