//! Market-share statistics over ensembles of independent realizations.

use rayon::prelude::*;

use crate::error::Result;
use crate::model::{ItemRef, MarketState, ModelParams};
use crate::sim;

/// Fraction defining the "top" cutoff share; 5 items at 100 items.
pub const TOP_FRACTION: f64 = 0.05;

/// Ensemble summary of one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct ShareStats {
    /// Mean advertised market share over realizations (F_a).
    pub f_a: f64,
    /// Mean threshold share for the top-5% cutoff (F_5%).
    pub f_top: f64,
    /// Mean minimum market share among all items (F_min).
    pub f_min: f64,
    /// Sample standard deviation of the advertised share across realizations.
    pub std_f_a: f64,
    /// Number of realizations aggregated.
    pub n_realizations: usize,
}

/// Lowest market share an item needs to be in the top `fraction` of the
/// field: the ceil(fraction * field)-th largest share. The field is the
/// regular items, or regular plus advertised when the flag is set; ties make
/// the ordering among equals irrelevant.
pub fn top_percentile_share(state: &MarketState, fraction: f64, include_advertised: bool) -> f64 {
    assert!(
        fraction > 0.0 && fraction < 1.0,
        "fraction must lie strictly between 0 and 1"
    );
    let mut shares: Vec<f64> = (1..=state.n_items())
        .map(|ix| state.market_share(ItemRef::Regular(ix)))
        .collect();
    if include_advertised {
        shares.push(state.advertised_share());
    }
    let k = (fraction * shares.len() as f64).ceil() as usize;
    shares.sort_unstable_by(|a, b| b.partial_cmp(a).expect("shares are finite"));
    shares[k - 1]
}

/// Minimum market share over all items, the advertised one included.
pub fn min_share(state: &MarketState) -> f64 {
    state
        .items()
        .map(|item| state.market_share(item))
        .fold(f64::INFINITY, f64::min)
}

/// Runs `n_realizations` independent simulations seeded
/// `seed_base, seed_base + 1, ...` and aggregates the final-state metrics.
///
/// Realizations execute in parallel on the global thread pool; aggregation
/// happens in seed order, so the result is a pure function of the inputs.
pub fn run_ensemble(
    params: &ModelParams,
    n_realizations: usize,
    seed_base: u64,
) -> Result<ShareStats> {
    params.validate()?;
    assert!(n_realizations >= 1, "need at least one realization");
    let per_run: Vec<(f64, f64, f64)> = (0..n_realizations)
        .into_par_iter()
        .map(|k| {
            let out = sim::run(params, seed_base.wrapping_add(k as u64), None)
                .expect("params validated above");
            let state = &out.final_state;
            (
                state.advertised_share(),
                top_percentile_share(state, TOP_FRACTION, false),
                min_share(state),
            )
        })
        .collect();

    let n = per_run.len() as f64;
    let f_a = per_run.iter().map(|r| r.0).sum::<f64>() / n;
    let f_top = per_run.iter().map(|r| r.1).sum::<f64>() / n;
    let f_min = per_run.iter().map(|r| r.2).sum::<f64>() / n;
    let std_f_a = if per_run.len() > 1 {
        let ss = per_run.iter().map(|r| (r.0 - f_a).powi(2)).sum::<f64>();
        (ss / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(ShareStats {
        f_a,
        f_top,
        f_min,
        std_f_a,
        n_realizations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ItemRef;
    use crate::sim::init_state;

    fn params(n: usize, i: usize, m: usize, p: f64) -> ModelParams {
        ModelParams::new(n, i, m, p)
    }

    #[test]
    fn equal_field_returns_the_common_share() {
        // 100 agents, 100 items, capacity 10: every share is 0.10.
        let state = init_state(&params(100, 100, 10, 0.1)).unwrap();
        assert_eq!(top_percentile_share(&state, 0.05, false), 0.10);
        // The unowned advertised item is outside the field by default; when
        // included it becomes the worst of 101 items.
        assert_eq!(top_percentile_share(&state, 0.99, false), 0.10);
        assert_eq!(top_percentile_share(&state, 0.995, true), 0.0);
    }

    #[test]
    fn top_share_is_kth_largest() {
        let p = params(4, 4, 2, 0.1);
        // Shares after init: every item 0.5; replace to make them unequal.
        let state = crate::model::MarketState::from_stocks(
            &p,
            &[
                vec![ItemRef::Regular(1), ItemRef::Regular(2)],
                vec![ItemRef::Regular(1), ItemRef::Regular(2)],
                vec![ItemRef::Regular(1), ItemRef::Regular(3)],
                vec![ItemRef::Regular(1), ItemRef::Regular(4)],
            ],
        )
        .unwrap();
        // Shares: item1 = 1.0, item2 = 0.5, items 3,4 = 0.25.
        assert_eq!(top_percentile_share(&state, 0.25, false), 1.0);
        assert_eq!(top_percentile_share(&state, 0.5, false), 0.5);
        assert_eq!(top_percentile_share(&state, 0.75, false), 0.25);
    }

    #[test]
    fn forgotten_fifth_item_pushes_top_share_to_zero() {
        // Near-absorbing layout: only 4 surviving items among 100, so the
        // 5th largest share is 0.
        let p = params(8, 100, 4, 0.1);
        let stock = vec![
            ItemRef::Regular(1),
            ItemRef::Regular(2),
            ItemRef::Regular(3),
            ItemRef::Regular(4),
        ];
        let state =
            crate::model::MarketState::from_stocks(&p, &vec![stock; 8]).unwrap();
        assert_eq!(top_percentile_share(&state, 0.05, false), 0.0);
        assert_eq!(min_share(&state), 0.0);
    }

    #[test]
    fn min_share_starts_at_zero_and_sees_every_item() {
        let state = init_state(&params(100, 100, 10, 0.1)).unwrap();
        // The advertised item is unowned at init.
        assert_eq!(min_share(&state), 0.0);

        // Fully covered market: every item owned at least once.
        let p = params(3, 2, 2, 0.1);
        let full = crate::model::MarketState::from_stocks(
            &p,
            &[
                vec![ItemRef::Regular(1), ItemRef::Regular(2)],
                vec![ItemRef::Regular(1), ItemRef::Advertised],
                vec![ItemRef::Regular(2), ItemRef::Advertised],
            ],
        )
        .unwrap();
        assert!(min_share(&full) > 0.0);
    }

    #[test]
    fn ensemble_is_deterministic() {
        // Short transient so per-seed outcomes still differ.
        let mut p = params(10, 10, 2, 0.05);
        p.interactions_per_pair = 2.0;
        let a = run_ensemble(&p, 4, 100).unwrap();
        let b = run_ensemble(&p, 4, 100).unwrap();
        assert_eq!(a, b);
        let c = run_ensemble(&p, 4, 101).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_pressure_ensemble_has_zero_share_and_spread() {
        let mut p = params(10, 10, 2, 0.0);
        p.interactions_per_pair = 10.0;
        let stats = run_ensemble(&p, 5, 7).unwrap();
        assert_eq!(stats.f_a, 0.0);
        assert_eq!(stats.std_f_a, 0.0);
        assert_eq!(stats.n_realizations, 5);
        assert!(stats.f_min <= stats.f_top);
    }

    #[test]
    fn single_realization_has_zero_std() {
        let mut p = params(6, 6, 2, 0.3);
        p.interactions_per_pair = 5.0;
        let stats = run_ensemble(&p, 1, 9).unwrap();
        assert_eq!(stats.std_f_a, 0.0);
    }
}
