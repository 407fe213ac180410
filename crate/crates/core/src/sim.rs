//! Event-level simulator for the recommendation-with-advertisement dynamics.
//!
//! One recommendation consists of six selections, all uniform: a giver, a
//! distinct taker, an item from the giver's stock, the purchase decision
//! (advertised item with probability `pressure`, the recommended item
//! otherwise), an ownership check that stops the step early, and finally the
//! item the taker discards to make room. Random draws always happen in the
//! order giver, taker, recommended, purchase coin, discard; the purchase
//! coin is drawn even when its outcome is forced so seeds stay aligned
//! across pressure settings.

use rand::distr::Uniform;

use crate::error::Result;
use crate::model::{MarketState, ModelParams, TransitionKind};
use crate::rng::RandomSource;

/// Result of one simulation run.
#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    /// Market state after the full recommendation budget.
    pub final_state: MarketState,
    /// Sampled `(recommendations_done, advertised share)` series, present
    /// when a sampling interval was requested.
    pub trajectory: Option<Vec<(u64, f64)>>,
    /// Seed this run was started with.
    pub seed: u64,
}

/// Explicit selections of a single recommendation step, for driving the
/// dynamics without a random source (enumeration oracles, forced scenarios).
#[derive(Debug, Clone, Copy)]
pub struct StepChoices {
    /// Giver index in `0..n_agents`.
    pub giver: usize,
    /// Taker rank in `0..n_agents-1`, counted over agents with the giver
    /// skipped.
    pub taker_rank: usize,
    /// Slot of the giver's stock holding the recommended item.
    pub recommend_slot: usize,
    /// Purchase decision: advertised item instead of the recommended one.
    pub adopt_advertised: bool,
    /// Slot of the taker's stock to discard when a purchase happens;
    /// ignored when the purchased item is already owned.
    pub discard_slot: usize,
}

/// Symmetric starting state: agent `k` owns items `(k*M + j) mod I` for
/// `j in 0..M`, i.e. the `N*M` stock slots are dealt consecutive item
/// indices modulo `I`. Every item therefore starts with either
/// `floor(N*M/I)` or `ceil(N*M/I)` owners, and nobody owns the advertised
/// item.
pub fn init_state(params: &ModelParams) -> Result<MarketState> {
    params.validate()?;
    let (n, i, m) = (params.n_agents, params.n_items, params.capacity);
    let mut state = MarketState::empty(n, i, m);
    for agent in 0..n {
        for slot in 0..m {
            state.insert_initial(agent, slot, ((agent * m + slot) % i) as u32);
        }
    }
    Ok(state)
}

#[inline]
fn resolve_taker(giver: usize, rank: usize) -> usize {
    if rank >= giver {
        rank + 1
    } else {
        rank
    }
}

/// Core of one recommendation once giver, taker, recommended item and the
/// purchase decision are fixed. `discard_slot` is only invoked when a
/// purchase actually happens, mirroring the lazy sixth selection.
#[inline]
fn execute(
    state: &mut MarketState,
    giver: usize,
    taker: usize,
    recommend_slot: usize,
    adopt_advertised: bool,
    discard_slot: impl FnOnce() -> usize,
) -> TransitionKind {
    debug_assert_ne!(giver, taker);
    let advertised = state.advertised_code();
    let recommended = state.slot_code(giver, recommend_slot);
    let purchased = if adopt_advertised { advertised } else { recommended };
    state.bump_recommendations();
    if state.owns_code(taker, purchased) {
        return TransitionKind::Stay;
    }
    let slot = discard_slot();
    let discarded = state.replace_slot(taker, slot, purchased);
    if purchased == advertised {
        TransitionKind::Up
    } else if discarded == advertised {
        TransitionKind::Down
    } else {
        TransitionKind::Stay
    }
}

/// Executes one recommendation with all selections supplied by the caller.
///
/// Counts against the recommendation budget exactly like a random step; the
/// discard slot is ignored when the purchased item is already owned.
pub fn apply_choices(state: &mut MarketState, choices: StepChoices) -> TransitionKind {
    let taker = resolve_taker(choices.giver, choices.taker_rank);
    execute(
        state,
        choices.giver,
        taker,
        choices.recommend_slot,
        choices.adopt_advertised,
        || choices.discard_slot,
    )
}

/// Prepared uniform samplers for the three index draws of a step.
struct StepSampler {
    giver: Uniform<usize>,
    taker_rank: Uniform<usize>,
    slot: Uniform<usize>,
    pressure: f64,
}

impl StepSampler {
    fn new(params: &ModelParams) -> Self {
        Self {
            giver: Uniform::new(0, params.n_agents).expect("n_agents >= 2"),
            taker_rank: Uniform::new(0, params.n_agents - 1).expect("n_agents >= 2"),
            slot: Uniform::new(0, params.capacity).expect("capacity >= 1"),
            pressure: params.pressure,
        }
    }

    #[inline]
    fn step(&self, state: &mut MarketState, rng: &mut RandomSource) -> TransitionKind {
        let giver = rng.sample(&self.giver);
        let taker = resolve_taker(giver, rng.sample(&self.taker_rank));
        let recommend_slot = rng.sample(&self.slot);
        let adopt = rng.chance(self.pressure);
        execute(state, giver, taker, recommend_slot, adopt, || {
            rng.sample(&self.slot)
        })
    }
}

/// Executes one uniformly random recommendation on `state`.
///
/// Returns whether the advertised owner count went up, down or stayed;
/// `recommendations_done` is incremented in every case, including early
/// stops where the purchased item is already owned.
pub fn recommendation_step(
    state: &mut MarketState,
    params: &ModelParams,
    rng: &mut RandomSource,
) -> TransitionKind {
    StepSampler::new(params).step(state, rng)
}

/// Runs the full recommendation budget `ceil(nu * N^2)` from the symmetric
/// initial state, with the stream seeded from `seed`.
///
/// When `sample_every` is given, the advertised share is recorded after
/// every that many recommendations.
pub fn run(params: &ModelParams, seed: u64, sample_every: Option<u64>) -> Result<SimulationOutcome> {
    let mut state = init_state(params)?;
    let mut rng = RandomSource::from_seed(seed);
    let sampler = StepSampler::new(params);
    let total = params.total_recommendations();
    if let Some(every) = sample_every {
        assert!(every > 0, "sample_every must be positive");
        let mut trajectory = Vec::with_capacity((total / every) as usize);
        for step in 1..=total {
            sampler.step(&mut state, &mut rng);
            if step % every == 0 {
                trajectory.push((step, state.advertised_share()));
            }
        }
        Ok(SimulationOutcome {
            final_state: state,
            trajectory: Some(trajectory),
            seed,
        })
    } else {
        for _ in 0..total {
            sampler.step(&mut state, &mut rng);
        }
        Ok(SimulationOutcome {
            final_state: state,
            trajectory: None,
            seed,
        })
    }
}
