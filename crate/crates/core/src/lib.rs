//! Attention competition in a compulsive market with a single advertised item.
//!
//! A population of `N` agents holds attention stocks of exactly `M` distinct
//! items out of `I` regular items plus one globally advertised item. Agents
//! exchange items through uniformly random recommendations; with probability
//! `p` (the advertisement pressure) the taker purchases the advertised item
//! instead of the recommended one. Because each recommendation changes the
//! number of agents owning the advertised item by at most one, that count
//! evolves as a birth-death chain, which this crate analyses exactly
//! alongside the event-level simulator.
//!
//! The crate is organised as:
//!
//! - [`model`] — parameters, item references and the market state shared by
//!   the simulator and the analytic engine;
//! - [`sim`] — the seeded, deterministic recommendation-step simulator;
//! - [`analytic`] — transition rates, stationary distributions and the
//!   expected advertised share of the birth-death chain;
//! - [`metrics`] — market-share statistics over ensembles of realizations;
//! - [`experiments`] — the capacity-ratio, item-count and run-length sweeps.
//!
//! The chain formulas in [`analytic`] are generic over [`scalar::Scalar`]
//! so the same code evaluates in `f64`/`f32` for production and in exact
//! rational arithmetic in tests.

pub mod analytic;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod sim;

pub use analytic::{StationaryDistribution, TransitionRates};
pub use error::{Error, Result};
pub use experiments::{ExperimentRecord, ItemSizeRow, StationarityRow};
pub use metrics::ShareStats;
pub use model::{GammaPolicy, ItemRef, MarketState, ModelParams, TransitionKind};
pub use rng::RandomSource;
pub use sim::{SimulationOutcome, StepChoices};

/// Scalar type used by all non-test numerics.
pub type Real = f64;
