use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("a group needs at least 2 proposals, got {0}")]
    TooFewProposals(usize),
    #[error("reviews per PI must satisfy 1 <= m <= N-1 (m = {m}, N = {n})")]
    ReviewsPerPi { m: usize, n: usize },
    #[error("acceptance rate must lie in (0, 1), got {0}")]
    AcceptanceRate(f64),
    #[error("utility exponent p must be positive, got {0}")]
    UtilityExponent(f64),
    #[error("noise sigma must be finite and non-negative, got {0}")]
    Noise(f64),
    #[error("controversy shift must be finite and non-negative, got {0}")]
    Shift(f64),
    #[error("probability must lie in [0, 1], got {0}")]
    Probability(f64),
    #[error("merit index {merit} is outside 1..={n}")]
    MeritOutOfRange { merit: usize, n: usize },
    #[error("PI {0} cannot be their own ally")]
    SelfAlly(usize),
    #[error("replication count must be at least 1")]
    NoReplications,
    #[error("{0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("could not sample a valid assignment for N = {n}, m = {m} (mutual review allowed: {mutual})")]
    SamplingExhausted { n: usize, m: usize, mutual: bool },
}
