//! Exact birth-death chain analysis of the advertised-owner count.
//!
//! The number of agents owning the advertised item moves by at most one per
//! recommendation, so it forms a birth-death chain on states `0..=N`. This
//! module builds the per-state up/down/stay probabilities from the selection
//! tree of one recommendation, solves for the stationary distribution, and
//! derives the expected advertised market share.
//!
//! Everything is generic over [`Scalar`] so the very same formulas run in
//! `f64` for production and in exact rational arithmetic as the test oracle;
//! the `*_in` functions are the generic entry points, the plain names are
//! the `f64` conveniences.

use crate::error::{Error, Result};
use crate::model::{GammaPolicy, ModelParams};
use crate::scalar::{Float, Scalar};

/// The gamma value a parameter set's policy resolves to.
///
/// `ExactM1` is 0 and legal only at capacity 1; `Approximation` is
/// `max(0.5, M/I)`; `Fixed(v)` is `v`.
pub fn gamma_value(params: &ModelParams) -> Result<f64> {
    gamma_value_in::<f64>(params)
}

/// [`gamma_value`] in any scalar type.
pub fn gamma_value_in<S: Scalar>(params: &ModelParams) -> Result<S> {
    match params.gamma_policy {
        GammaPolicy::ExactM1 => {
            if params.capacity != 1 {
                return Err(Error::PolicyMismatch {
                    capacity: params.capacity,
                });
            }
            Ok(S::zero())
        }
        GammaPolicy::Approximation => {
            let half = S::one() / S::from_count(2);
            let rho = params.rho_in::<S>();
            Ok(if rho > half { rho } else { half })
        }
        GammaPolicy::Fixed(v) => Ok(S::from_f64(v).expect("gamma is finite")),
    }
}

/// Probability that one recommendation moves the chain from `i` to `i + 1`:
///
/// `p_i = (N - i) / (N (N - 1)) * [ (N - 1 - i/M) p + i/M ]`
pub fn transition_up(i: usize, params: &ModelParams) -> f64 {
    transition_up_in(i, params.n_agents, params.capacity, &params.pressure)
}

/// [`transition_up`] in any scalar type.
pub fn transition_up_in<S: Scalar>(
    i: usize,
    n_agents: usize,
    capacity: usize,
    pressure: &S,
) -> S {
    let n = S::from_count(n_agents);
    let m = S::from_count(capacity);
    let i_s = S::from_count(i);
    let n_minus_1 = n.clone() - S::one();
    let i_over_m = i_s.clone() / m;
    let weight = (n.clone() - i_s) / (n * n_minus_1.clone());
    weight * ((n_minus_1 - i_over_m.clone()) * pressure.clone() + i_over_m)
}

/// Probability that one recommendation moves the chain from `i` to `i - 1`:
///
/// `q_i = i (1 - p) (1 - gamma) / (N (N - 1) M) * [ N - i + (i - 1)(M - 1)/M ]`
pub fn transition_down(i: usize, params: &ModelParams, gamma: f64) -> f64 {
    transition_down_in(i, params.n_agents, params.capacity, &params.pressure, &gamma)
}

/// [`transition_down`] in any scalar type.
pub fn transition_down_in<S: Scalar>(
    i: usize,
    n_agents: usize,
    capacity: usize,
    pressure: &S,
    gamma: &S,
) -> S {
    let n = S::from_count(n_agents);
    let m = S::from_count(capacity);
    let i_s = S::from_count(i);
    let one = S::one();
    let n_minus_1 = n.clone() - one.clone();
    let weight = i_s.clone() * (one.clone() - pressure.clone()) * (one.clone() - gamma.clone())
        / (n.clone() * n_minus_1 * m.clone());
    let bracket = (n - i_s.clone()) + (i_s - one.clone()) * (m.clone() - one) / m;
    weight * bracket
}

/// Per-state transition probabilities of the advertised-owner chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRates<S = f64> {
    up: Vec<S>,
    down: Vec<S>,
    stay: Vec<S>,
    gamma_used: S,
}

impl<S: Scalar> TransitionRates<S> {
    /// Assembles rates from up/down vectors, deriving `stay = 1 - up - down`
    /// and validating the chain shape: equal lengths covering states
    /// `0..=N`, entries in `[0, 1]`, `down[0] = 0` and `up[N] = 0`.
    pub fn from_parts(up: Vec<S>, down: Vec<S>, gamma_used: S) -> Result<Self> {
        if up.len() != down.len() || up.len() < 2 {
            return Err(Error::DegenerateRates {
                detail: format!(
                    "need matching up/down vectors over at least 2 states, got {} and {}",
                    up.len(),
                    down.len()
                ),
            });
        }
        let n = up.len() - 1;
        if !down[0].is_zero() {
            return Err(Error::DegenerateRates {
                detail: "down[0] must be 0".into(),
            });
        }
        if !up[n].is_zero() {
            return Err(Error::DegenerateRates {
                detail: format!("up[{n}] must be 0"),
            });
        }
        let mut stay = Vec::with_capacity(up.len());
        for (i, (u, d)) in up.iter().zip(&down).enumerate() {
            let in_unit = |x: &S| *x >= S::zero() && *x <= S::one();
            if !in_unit(u) || !in_unit(d) {
                return Err(Error::DegenerateRates {
                    detail: format!("rate outside [0, 1] at state {i}"),
                });
            }
            let rest = S::one() - u.clone() - d.clone();
            if rest < S::zero() {
                return Err(Error::DegenerateRates {
                    detail: format!("up + down exceeds 1 at state {i}"),
                });
            }
            stay.push(rest);
        }
        Ok(Self {
            up,
            down,
            stay,
            gamma_used,
        })
    }

    /// Number of agents N; the chain has `N + 1` states.
    pub fn n_agents(&self) -> usize {
        self.up.len() - 1
    }

    /// Up-transition probabilities, indexed by state.
    pub fn up(&self) -> &[S] {
        &self.up
    }

    /// Down-transition probabilities, indexed by state.
    pub fn down(&self) -> &[S] {
        &self.down
    }

    /// Stay probabilities, indexed by state.
    pub fn stay(&self) -> &[S] {
        &self.stay
    }

    /// The gamma value these rates were built with.
    pub fn gamma_used(&self) -> &S {
        &self.gamma_used
    }
}

/// Builds the full rate table for a parameter set, resolving gamma from the
/// parameter's policy.
pub fn build_rates(params: &ModelParams) -> Result<TransitionRates<f64>> {
    params.validate()?;
    let gamma = gamma_value(params)?;
    build_rates_in(params.n_agents, params.capacity, &params.pressure, &gamma)
}

/// [`build_rates`] in any scalar type, with gamma supplied explicitly.
pub fn build_rates_in<S: Scalar>(
    n_agents: usize,
    capacity: usize,
    pressure: &S,
    gamma: &S,
) -> Result<TransitionRates<S>> {
    let up = (0..=n_agents)
        .map(|i| transition_up_in(i, n_agents, capacity, pressure))
        .collect();
    let down = (0..=n_agents)
        .map(|i| transition_down_in(i, n_agents, capacity, pressure, gamma))
        .collect();
    TransitionRates::from_parts(up, down, gamma.clone())
}

/// Stationary distribution over the chain states `0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution<S = f64> {
    pi: Vec<S>,
}

impl<S: Float> StationaryDistribution<S> {
    /// State probabilities, indexed by advertised-owner count.
    pub fn pi(&self) -> &[S] {
        &self.pi
    }

    /// Expected advertised-owner count under this distribution.
    pub fn mean(&self) -> S {
        self.pi
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (i, p)| acc + S::from_count(i) * *p)
    }
}

/// Solves for the stationary distribution of a rate table.
///
/// In the regular regime (every `down[k] > 0` for `k >= 1`) the detailed
/// balance products `pi_i = pi_0 * prod up[k-1]/down[k]` are evaluated as
/// cumulative log sums and normalised with log-sum-exp, so the
/// astronomically large ratios of drift-heavy chains cannot overflow. When
/// `down[N] = 0` while every state below N can still move up, all mass ends
/// at `N` and the degenerate distribution is returned directly. Any other
/// blocked structure has no unique stationary distribution and is rejected;
/// rates built by [`build_rates`] from valid parameters with `pressure > 0`
/// never trigger that case.
pub fn stationary<S: Float>(rates: &TransitionRates<S>) -> Result<StationaryDistribution<S>> {
    let n = rates.n_agents();
    let up = rates.up();
    let down = rates.down();

    if down[n].is_zero() {
        if (0..n).all(|j| !up[j].is_zero()) {
            let mut pi = vec![S::zero(); n + 1];
            pi[n] = S::one();
            return Ok(StationaryDistribution { pi });
        }
        return Err(Error::ReducibleChain);
    }
    if (1..n).any(|k| down[k].is_zero()) {
        return Err(Error::ReducibleChain);
    }

    // log of the unnormalised weights; states above a zero up-rate get
    // weight ln(0) = -inf, i.e. exactly zero mass after normalisation.
    let mut log_weights = Vec::with_capacity(n + 1);
    let mut acc = S::zero();
    log_weights.push(acc);
    for k in 1..=n {
        acc = acc + up[k - 1].ln() - down[k].ln();
        log_weights.push(acc);
    }
    let max = log_weights
        .iter()
        .fold(S::neg_infinity(), |a, &b| if b > a { b } else { a });
    let total = log_weights
        .iter()
        .fold(S::zero(), |acc, &lw| acc + (lw - max).exp());
    let log_norm = max + total.ln();
    let pi = log_weights.iter().map(|&lw| (lw - log_norm).exp()).collect();
    Ok(StationaryDistribution { pi })
}

/// Expected market share of the advertised item: the stationary mean of the
/// advertised-owner count over N.
pub fn expected_advertised_share(params: &ModelParams) -> Result<f64> {
    let rates = build_rates(params)?;
    let pi = stationary(&rates)?;
    Ok(pi.mean() / params.n_agents as f64)
}

/// Closed-form up/down ratio at capacity 1 (gamma = 0):
///
/// `p_i / q_i = 1 + (N - 1)/i * p/(1 - p)` for `1 <= i <= N - 1`.
pub fn m1_up_down_ratio(i: usize, params: &ModelParams) -> Result<f64> {
    m1_up_down_ratio_in(i, params.n_agents, params.capacity, &params.pressure)
}

/// [`m1_up_down_ratio`] in any scalar type.
pub fn m1_up_down_ratio_in<S: Scalar>(
    i: usize,
    n_agents: usize,
    capacity: usize,
    pressure: &S,
) -> Result<S> {
    if capacity != 1 {
        return Err(Error::PolicyMismatch { capacity });
    }
    if *pressure <= S::zero() || *pressure >= S::one() {
        return Err(Error::PressureOutOfRange {
            pressure: pressure.to_f64().unwrap_or(f64::NAN),
        });
    }
    assert!(
        i >= 1 && i < n_agents,
        "ratio defined for interior states 1..N only"
    );
    let one = S::one();
    let n_minus_1 = S::from_count(n_agents) - one.clone();
    let i_s = S::from_count(i);
    Ok(one.clone() + n_minus_1 / i_s * (pressure.clone() / (one - pressure.clone())))
}

/// Dense `(N+1) x (N+1)` transition matrix of the chain: row `i` holds
/// `down[i]`, `stay[i]`, `up[i]` at columns `i-1`, `i`, `i+1`. Rows sum to
/// one; the tests use this explicit matrix as the power-method oracle for
/// [`stationary`].
pub fn build_transition_matrix<S: Scalar>(rates: &TransitionRates<S>) -> Vec<Vec<S>> {
    let n = rates.n_agents();
    (0..=n)
        .map(|i| {
            let mut row = vec![S::zero(); n + 1];
            if i > 0 {
                row[i - 1] = rates.down()[i].clone();
            }
            row[i] = rates.stay()[i].clone();
            if i < n {
                row[i + 1] = rates.up()[i].clone();
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, i: usize, m: usize, p: f64) -> ModelParams {
        ModelParams::new(n, i, m, p)
    }

    fn m1_params(n: usize, i: usize, p: f64) -> ModelParams {
        let mut pr = params(n, i, 1, p);
        pr.gamma_policy = GammaPolicy::ExactM1;
        pr
    }

    #[test]
    fn gamma_policies_resolve_as_specified() {
        assert_eq!(gamma_value(&m1_params(100, 100, 0.1)).unwrap(), 0.0);

        // Approximation takes max(0.5, M/I).
        assert_eq!(gamma_value(&params(100, 100, 10, 0.1)).unwrap(), 0.5);
        assert_eq!(gamma_value(&params(100, 100, 90, 0.1)).unwrap(), 0.9);

        let mut fixed = params(100, 100, 10, 0.1);
        fixed.gamma_policy = GammaPolicy::Fixed(0.3);
        assert_eq!(gamma_value(&fixed).unwrap(), 0.3);

        let mut mismatch = params(100, 100, 2, 0.1);
        mismatch.gamma_policy = GammaPolicy::ExactM1;
        assert_eq!(
            gamma_value(&mismatch),
            Err(Error::PolicyMismatch { capacity: 2 })
        );
    }

    #[test]
    fn up_rate_boundaries() {
        let p = params(100, 100, 10, 0.1);
        assert_eq!(transition_up(100, &p), 0.0);
        // At i = 0 the expression collapses to the pressure itself.
        for &pressure in &[0.0, 1e-4, 0.37, 1.0] {
            let pr = params(37, 50, 5, pressure);
            assert!((transition_up(0, &pr) - pressure).abs() <= 1e-15);
        }
    }

    #[test]
    fn up_rate_matches_hand_evaluation() {
        // (N=100, M=10, p=0.1, i=50): (50/9900) * (94 * 0.1 + 5) = 4/55.
        let p = params(100, 100, 10, 0.1);
        let expected = 4.0 / 55.0;
        assert!((transition_up(50, &p) - expected).abs() <= 1e-15);
    }

    #[test]
    fn down_rate_boundaries() {
        let p = params(100, 100, 10, 0.1);
        assert_eq!(transition_down(0, &p, 0.5), 0.0);
        let pure = params(100, 100, 10, 1.0);
        for i in 0..=100 {
            assert_eq!(transition_down(i, &pure, 0.5), 0.0);
        }
        // Full gamma also kills every down rate.
        for i in 0..=100 {
            assert_eq!(transition_down(i, &p, 1.0), 0.0);
        }
    }

    #[test]
    fn down_rate_matches_hand_evaluation() {
        // (N=100, M=10, p=0.1, gamma=0.5, i=50):
        // (50 * 0.9 * 0.5 / 99000) * (50 + 49*9/10) = 941/44000.
        let p = params(100, 100, 10, 0.1);
        let expected = 941.0 / 44000.0;
        assert!((transition_down(50, &p, 0.5) - expected).abs() <= 1e-15);
    }

    #[test]
    fn zero_pressure_up_rates_reduce_to_word_of_mouth() {
        // With p = 0 the up rate is i(N-i) / (N(N-1)M).
        let p = params(40, 60, 6, 0.0);
        let (n, m) = (40.0, 6.0);
        for i in 0..=40 {
            let expected = i as f64 * (n - i as f64) / (n * (n - 1.0) * m);
            assert!((transition_up(i, &p) - expected).abs() <= 1e-15);
        }
        assert_eq!(transition_up(0, &p), 0.0);
    }

    #[test]
    fn rates_sum_to_one_with_legal_boundaries() {
        for &(n, i, m, pr) in &[
            (100, 100, 10, 0.1),
            (50, 80, 3, 1e-4),
            (7, 9, 9, 0.9),
            (2, 1, 1, 0.5),
        ] {
            let rates = build_rates(&params(n, i, m, pr)).unwrap();
            let nn = rates.n_agents();
            assert_eq!(rates.down()[0], 0.0);
            assert_eq!(rates.up()[nn], 0.0);
            for k in 0..=nn {
                let sum = rates.up()[k] + rates.down()[k] + rates.stay()[k];
                assert!((sum - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn from_parts_rejects_broken_shapes() {
        // down[0] != 0
        assert!(matches!(
            TransitionRates::from_parts(vec![0.5, 0.0], vec![0.1, 0.2], 0.0),
            Err(Error::DegenerateRates { .. })
        ));
        // up[N] != 0
        assert!(matches!(
            TransitionRates::from_parts(vec![0.5, 0.1], vec![0.0, 0.2], 0.0),
            Err(Error::DegenerateRates { .. })
        ));
        // up + down = 1 is a legal zero-stay state, exceeding 1 is not.
        assert!(TransitionRates::from_parts(vec![0.9, 0.0], vec![0.0, 1.0], 0.0).is_ok());
        assert!(matches!(
            TransitionRates::from_parts(vec![0.7, 0.6, 0.0], vec![0.0, 0.6, 0.1], 0.0),
            Err(Error::DegenerateRates { .. })
        ));
    }

    #[test]
    fn pure_advertisement_drifts_to_everyone_infected() {
        let rates = build_rates(&params(30, 30, 3, 1.0)).unwrap();
        assert!(rates.down().iter().all(|&q| q == 0.0));
        let pi = stationary(&rates).unwrap();
        assert_eq!(pi.pi()[30], 1.0);
        assert!(pi.pi()[..30].iter().all(|&x| x == 0.0));
        assert_eq!(expected_advertised_share(&params(30, 30, 3, 1.0)).unwrap(), 1.0);
    }

    #[test]
    fn capacity_one_drifts_to_everyone_infected() {
        for &p in &[1e-4, 1e-2, 0.3, 0.9] {
            assert_eq!(expected_advertised_share(&m1_params(25, 40, p)).unwrap(), 1.0);
        }
        // The approximation policy hits the same degenerate case at M = 1.
        assert_eq!(expected_advertised_share(&params(25, 40, 1, 0.01)).unwrap(), 1.0);
    }

    #[test]
    fn stationary_normalises_and_balances() {
        let rates = build_rates(&params(60, 100, 12, 0.01)).unwrap();
        let dist = stationary(&rates).unwrap();
        let sum: f64 = dist.pi().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12);
        assert!(dist.pi().iter().all(|&x| x >= 0.0));
        // Detailed balance of the returned distribution.
        for i in 0..60 {
            let lhs = dist.pi()[i] * rates.up()[i];
            let rhs = dist.pi()[i + 1] * rates.down()[i + 1];
            assert!((lhs - rhs).abs() <= 1e-10);
        }
    }

    #[test]
    fn zero_pressure_stationary_is_all_mass_at_zero() {
        let rates = build_rates(&params(20, 30, 4, 0.0)).unwrap();
        let dist = stationary(&rates).unwrap();
        assert_eq!(dist.pi()[0], 1.0);
        assert!(dist.pi()[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn blocked_chain_without_upward_drift_is_rejected() {
        // down[N] = 0 but state 0 cannot move up either: two absorbing
        // components, no unique stationary distribution.
        let rates =
            TransitionRates::from_parts(vec![0.0, 0.5, 0.0], vec![0.0, 0.2, 0.0], 0.0).unwrap();
        assert_eq!(stationary(&rates), Err(Error::ReducibleChain));
        // Interior blocked down rate with an open top is just as reducible.
        let rates =
            TransitionRates::from_parts(vec![0.5, 0.5, 0.0], vec![0.0, 0.0, 0.2], 0.0).unwrap();
        assert_eq!(stationary(&rates), Err(Error::ReducibleChain));
    }

    #[test]
    fn expected_share_is_monotone_in_pressure() {
        let mut shares = Vec::new();
        for &p in &[1e-4, 1e-3, 1e-2, 1e-1, 1.0] {
            let mut pr = params(40, 40, 4, p);
            pr.gamma_policy = GammaPolicy::Fixed(0.5);
            shares.push(expected_advertised_share(&pr).unwrap());
        }
        for w in shares.windows(2) {
            assert!(w[0] <= w[1] + 1e-12);
        }
    }

    #[test]
    fn m1_ratio_matches_hand_value() {
        assert_eq!(m1_up_down_ratio(1, &m1_params(2, 5, 0.5)).unwrap(), 2.0);
    }

    #[test]
    fn m1_ratio_requires_capacity_one_and_open_pressure() {
        assert_eq!(
            m1_up_down_ratio(1, &params(10, 10, 2, 0.5)),
            Err(Error::PolicyMismatch { capacity: 2 })
        );
        assert!(matches!(
            m1_up_down_ratio(1, &m1_params(10, 10, 0.0)),
            Err(Error::PressureOutOfRange { .. })
        ));
        assert!(matches!(
            m1_up_down_ratio(1, &m1_params(10, 10, 1.0)),
            Err(Error::PressureOutOfRange { .. })
        ));
    }

    #[test]
    fn m1_ratio_exceeds_one_and_matches_rates() {
        for &p in &[1e-3, 0.2, 0.8] {
            for &(n, i) in &[(5usize, 1usize), (50, 10), (100, 99)] {
                let pr = m1_params(n, 200, p);
                let ratio = m1_up_down_ratio(i, &pr).unwrap();
                assert!(ratio > 1.0);
                let direct = transition_up(i, &pr) / transition_down(i, &pr, 0.0);
                assert!((ratio - direct).abs() / direct <= 1e-12);
            }
        }
    }

    #[test]
    fn transition_matrix_is_row_stochastic() {
        let rates = build_rates(&params(12, 20, 3, 0.05)).unwrap();
        let t = build_transition_matrix(&rates);
        assert_eq!(t.len(), 13);
        for row in &t {
            assert_eq!(row.len(), 13);
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
        }
        // Reflecting bottom boundary: no subdiagonal entry in row 0.
        assert_eq!(t[0][0], rates.stay()[0]);
        assert_eq!(t[0][1], rates.up()[0]);
        assert!(t[0][2..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn smallest_chain_matrix_has_the_expected_shape() {
        // Hand-built two-state rates (N = 1 is below the simulator's reach
        // but the matrix builder accepts any well-formed table).
        let (p0, q1) = (0.3, 0.2);
        let rates = TransitionRates::from_parts(vec![p0, 0.0], vec![0.0, q1], 0.0).unwrap();
        let t = build_transition_matrix(&rates);
        assert_eq!(t, vec![vec![1.0 - p0, p0], vec![q1, 1.0 - q1]]);
    }
}
