//! Error type shared across the crate.

/// Result alias used throughout the library.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when validating parameters, building chain
/// rates or running an experiment.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("capacity {capacity} exceeds item count {n_items}")]
    CapacityExceedsItems { capacity: usize, n_items: usize },

    #[error("at least 2 agents are required (got {n_agents}); every recommendation needs a giver and a distinct taker")]
    TooFewAgents { n_agents: usize },

    #[error("pressure must lie in [0, 1] (got {pressure})")]
    PressureOutOfRange { pressure: f64 },

    #[error("{field} must be positive (got {value})")]
    NonPositiveCount { field: &'static str, value: f64 },

    #[error("fixed gamma must lie in [0, 1] (got {gamma})")]
    GammaOutOfRange { gamma: f64 },

    #[error("gamma policy requires capacity 1 (got capacity {capacity})")]
    PolicyMismatch { capacity: usize },

    #[error("degenerate transition rates: {detail}")]
    DegenerateRates { detail: String },

    #[error("chain is reducible: no unique stationary distribution for these rates")]
    ReducibleChain,

    #[error("rho {rho} does not map to an integer capacity for {n_items} items")]
    NonIntegerCapacity { rho: f64, n_items: usize },

    #[error("reference advertised share is zero at rho {rho}, pressure {pressure}: relative share undefined")]
    DivisionByZeroShare { rho: f64, pressure: f64 },

    #[error("invalid stock layout: {0}")]
    InvalidStock(String),
}
