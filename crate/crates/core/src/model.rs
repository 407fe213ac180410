//! Domain types shared by the simulator and the analytic engine.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How the analytic engine picks gamma, the probability that a recommended
/// item is already owned by the taker.
///
/// Gamma is exactly 0 when the capacity is 1 (the giver's and taker's single
/// items must differ on the only path where it matters); for larger
/// capacities it cannot be derived in closed form and is approximated by
/// `max(0.5, M/I)`. `Fixed` exposes the knob directly for sensitivity
/// studies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaPolicy {
    /// Gamma = 0; legal only when `capacity == 1`.
    ExactM1,
    /// Gamma = max(0.5, capacity / n_items).
    Approximation,
    /// Gamma pinned to the given value in `[0, 1]`.
    Fixed(f64),
}

/// All scalar parameters of one model instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Number of agents (N).
    pub n_agents: usize,
    /// Number of regular, non-advertised items (I).
    pub n_items: usize,
    /// Attention capacity: distinct items each agent holds (M).
    pub capacity: usize,
    /// Advertisement pressure: probability the taker purchases the
    /// advertised item instead of the recommended one (p).
    pub pressure: f64,
    /// Average interactions per ordered agent pair (nu); a run performs
    /// `ceil(nu * N^2)` recommendations.
    pub interactions_per_pair: f64,
    /// Gamma selection policy for the analytic engine.
    pub gamma_policy: GammaPolicy,
}

impl ModelParams {
    /// Convenience constructor; `interactions_per_pair` defaults to 1000 and
    /// the gamma policy to [`GammaPolicy::Approximation`].
    pub fn new(n_agents: usize, n_items: usize, capacity: usize, pressure: f64) -> Self {
        Self {
            n_agents,
            n_items,
            capacity,
            pressure,
            interactions_per_pair: 1000.0,
            gamma_policy: GammaPolicy::Approximation,
        }
    }

    /// Checks every parameter invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        if self.n_items == 0 {
            return Err(Error::NonPositiveCount {
                field: "n_items",
                value: self.n_items as f64,
            });
        }
        if self.capacity == 0 {
            return Err(Error::NonPositiveCount {
                field: "capacity",
                value: self.capacity as f64,
            });
        }
        if self.n_agents < 2 {
            return Err(Error::TooFewAgents {
                n_agents: self.n_agents,
            });
        }
        if self.capacity > self.n_items {
            return Err(Error::CapacityExceedsItems {
                capacity: self.capacity,
                n_items: self.n_items,
            });
        }
        if !(self.pressure >= 0.0 && self.pressure <= 1.0) {
            return Err(Error::PressureOutOfRange {
                pressure: self.pressure,
            });
        }
        if self.interactions_per_pair <= 0.0 || !self.interactions_per_pair.is_finite() {
            return Err(Error::NonPositiveCount {
                field: "interactions_per_pair",
                value: self.interactions_per_pair,
            });
        }
        if let GammaPolicy::Fixed(g) = self.gamma_policy {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::GammaOutOfRange { gamma: g });
            }
        }
        Ok(())
    }

    /// Attention capacity ratio `capacity / n_items`, in `(0, 1]`.
    pub fn rho(&self) -> f64 {
        self.rho_in::<f64>()
    }

    /// [`Self::rho`] evaluated in any scalar type (exact for rationals).
    pub fn rho_in<S: Scalar>(&self) -> S {
        S::from_count(self.capacity) / S::from_count(self.n_items)
    }

    /// Total number of recommendation steps of one run: `ceil(nu * N^2)`.
    pub fn total_recommendations(&self) -> u64 {
        let n = self.n_agents as f64;
        (self.interactions_per_pair * n * n).ceil() as u64
    }
}

/// Reference to an item: one of the `I` regular items (1-based index) or the
/// single advertised item. The advertised item is distinguished structurally
/// so it can never collide with a regular index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ItemRef {
    /// Regular item with index in `1..=n_items`.
    Regular(usize),
    /// The distinguished advertised item.
    Advertised,
}

/// Effect of one recommendation on the number of agents owning the
/// advertised item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransitionKind {
    /// The advertised owner count increased by one.
    Up,
    /// The advertised owner count decreased by one.
    Down,
    /// No change in the advertised owner count.
    Stay,
}

/// Mutable per-run market state: each agent's attention stock plus an
/// incrementally maintained per-item owner count.
///
/// Internally items are stored as dense codes `0..n_items` for the regular
/// items and `n_items` for the advertised one; stocks are flat slot arrays
/// backed by a membership table so a recommendation step touches O(1)
/// memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarketState {
    n_agents: usize,
    n_items: usize,
    capacity: usize,
    /// `n_agents * capacity` item codes; agent `a` owns slots
    /// `a*capacity..(a+1)*capacity`.
    stocks: Vec<u32>,
    /// `n_agents * (n_items + 1)` membership flags.
    owned: Vec<bool>,
    /// `n_items + 1` owner counts, advertised last.
    owner_counts: Vec<u32>,
    recommendations_done: u64,
}

impl MarketState {
    pub(crate) fn empty(n_agents: usize, n_items: usize, capacity: usize) -> Self {
        Self {
            n_agents,
            n_items,
            capacity,
            stocks: vec![0; n_agents * capacity],
            owned: vec![false; n_agents * (n_items + 1)],
            owner_counts: vec![0; n_items + 1],
            recommendations_done: 0,
        }
    }

    /// Builds a state from explicit per-agent stocks, checking every state
    /// invariant. Mainly useful for tests and oracles; simulation runs start
    /// from [`crate::sim::init_state`].
    pub fn from_stocks(params: &ModelParams, stocks: &[Vec<ItemRef>]) -> Result<Self> {
        params.validate()?;
        if stocks.len() != params.n_agents {
            return Err(Error::InvalidStock(format!(
                "expected {} stocks, got {}",
                params.n_agents,
                stocks.len()
            )));
        }
        let mut state = Self::empty(params.n_agents, params.n_items, params.capacity);
        for (agent, stock) in stocks.iter().enumerate() {
            if stock.len() != params.capacity {
                return Err(Error::InvalidStock(format!(
                    "agent {} holds {} items, capacity is {}",
                    agent,
                    stock.len(),
                    params.capacity
                )));
            }
            for (slot, &item) in stock.iter().enumerate() {
                let code = state.code_of(item).ok_or_else(|| {
                    Error::InvalidStock(format!("agent {agent} holds out-of-range item {item:?}"))
                })?;
                if state.owned[agent * (state.n_items + 1) + code as usize] {
                    return Err(Error::InvalidStock(format!(
                        "agent {agent} holds duplicate item {item:?}"
                    )));
                }
                state.stocks[agent * state.capacity + slot] = code;
                state.owned[agent * (state.n_items + 1) + code as usize] = true;
                state.owner_counts[code as usize] += 1;
            }
        }
        Ok(state)
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Number of recommendations executed on this state so far.
    pub fn recommendations_done(&self) -> u64 {
        self.recommendations_done
    }

    pub(crate) fn bump_recommendations(&mut self) {
        self.recommendations_done += 1;
    }

    /// Dense code of an item, `None` if the regular index is out of range.
    fn code_of(&self, item: ItemRef) -> Option<u32> {
        match item {
            ItemRef::Regular(ix) if ix >= 1 && ix <= self.n_items => Some((ix - 1) as u32),
            ItemRef::Regular(_) => None,
            ItemRef::Advertised => Some(self.n_items as u32),
        }
    }

    fn item_of(&self, code: u32) -> ItemRef {
        if code as usize == self.n_items {
            ItemRef::Advertised
        } else {
            ItemRef::Regular(code as usize + 1)
        }
    }

    pub(crate) fn advertised_code(&self) -> u32 {
        self.n_items as u32
    }

    #[inline]
    pub(crate) fn slot_code(&self, agent: usize, slot: usize) -> u32 {
        self.stocks[agent * self.capacity + slot]
    }

    #[inline]
    pub(crate) fn owns_code(&self, agent: usize, code: u32) -> bool {
        self.owned[agent * (self.n_items + 1) + code as usize]
    }

    /// Replaces the item in `slot` of `agent` with `new_code`, keeping the
    /// membership table and owner counts in sync. The caller must ensure the
    /// agent does not already own `new_code`.
    #[inline]
    pub(crate) fn replace_slot(&mut self, agent: usize, slot: usize, new_code: u32) -> u32 {
        debug_assert!(!self.owns_code(agent, new_code));
        let row = agent * (self.n_items + 1);
        let old = std::mem::replace(&mut self.stocks[agent * self.capacity + slot], new_code);
        self.owned[row + old as usize] = false;
        self.owned[row + new_code as usize] = true;
        self.owner_counts[old as usize] -= 1;
        self.owner_counts[new_code as usize] += 1;
        old
    }

    pub(crate) fn insert_initial(&mut self, agent: usize, slot: usize, code: u32) {
        debug_assert!(!self.owns_code(agent, code));
        self.stocks[agent * self.capacity + slot] = code;
        self.owned[agent * (self.n_items + 1) + code as usize] = true;
        self.owner_counts[code as usize] += 1;
    }

    /// Does `agent` currently own `item`?
    pub fn owns(&self, agent: usize, item: ItemRef) -> bool {
        match self.code_of(item) {
            Some(code) => self.owns_code(agent, code),
            None => false,
        }
    }

    /// The set of items `agent` currently owns (slot order, which carries no
    /// meaning).
    pub fn stock(&self, agent: usize) -> Vec<ItemRef> {
        (0..self.capacity)
            .map(|slot| self.item_of(self.slot_code(agent, slot)))
            .collect()
    }

    /// Number of agents owning `item` (maintained incrementally).
    pub fn owner_count(&self, item: ItemRef) -> usize {
        match self.code_of(item) {
            Some(code) => self.owner_counts[code as usize] as usize,
            None => 0,
        }
    }

    /// Market share of `item`: owner count over the number of agents.
    pub fn market_share(&self, item: ItemRef) -> f64 {
        self.owner_count(item) as f64 / self.n_agents as f64
    }

    /// Market share of the advertised item (F_a of this state).
    pub fn advertised_share(&self) -> f64 {
        self.market_share(ItemRef::Advertised)
    }

    /// All items of this market: `Regular(1)..=Regular(n_items)`, then
    /// [`ItemRef::Advertised`].
    pub fn items(&self) -> impl Iterator<Item = ItemRef> + '_ {
        (0..=self.n_items).map(|code| self.item_of(code as u32))
    }

    /// Owner counts in [`Self::items`] order, as maintained incrementally.
    pub fn owner_counts(&self) -> Vec<usize> {
        self.owner_counts.iter().map(|&c| c as usize).collect()
    }

    /// Owner counts in [`Self::items`] order, recomputed from the stocks
    /// alone. Must always equal [`Self::owner_counts`]; the property tests
    /// rely on this as the consistency oracle for the incremental index.
    pub fn owner_counts_recomputed(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_items + 1];
        for &code in &self.stocks {
            counts[code as usize] += 1;
        }
        counts
    }
}
