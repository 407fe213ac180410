//! The three experiment families: advertised share versus capacity ratio,
//! the effect of the item count, and closeness to stationarity in the run
//! length.
//!
//! Grid points consume disjoint seed blocks of `n_realizations` seeds in
//! deterministic traversal order, so every experiment is a pure function of
//! its inputs.

use crate::analytic::expected_advertised_share;
use crate::error::{Error, Result};
use crate::metrics::{run_ensemble, ShareStats};
use crate::model::{GammaPolicy, ModelParams};

/// Relative band around 1 within which a run-length ratio counts as
/// stationary.
pub const STATIONARITY_BAND: f64 = 0.02;

/// One sweep point: parameters, measured ensemble statistics and the
/// analytic expectation where the sweep provides one.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub params: ModelParams,
    /// Attention capacity ratio of this point, `capacity / n_items`.
    pub rho: f64,
    pub stats: ShareStats,
    /// Expected advertised share from the chain analysis, when computed.
    pub analytic_f_a: Option<f64>,
    /// First seed of this point's realization block.
    pub seed_base: u64,
}

/// One row of the item-count experiment: advertised share at `n_items`
/// relative to the reference item count.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemSizeRow {
    pub rho: f64,
    pub n_items: usize,
    pub capacity: usize,
    pub pressure: f64,
    pub f_a: f64,
    pub f_a_reference: f64,
    /// `f_a / f_a_reference`.
    pub relative: f64,
    pub seed_base: u64,
}

/// One row of the run-length experiment: advertised share at `nu` relative
/// to the reference run length.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarityRow {
    pub rho: f64,
    pub capacity: usize,
    pub pressure: f64,
    pub nu: f64,
    pub reference_nu: f64,
    pub f_a: f64,
    pub f_a_reference: f64,
    /// `f_a / f_a_reference`.
    pub relative: f64,
    /// Whether `relative` lies within [`STATIONARITY_BAND`] of 1.
    pub stationary: bool,
    pub seed_base: u64,
}

/// Maps a requested capacity ratio to the integer capacity `round(rho * I)`,
/// rejecting ratios that do not land on an integer within 1e-9.
pub fn capacity_for_rho(rho: f64, n_items: usize) -> Result<usize> {
    let exact = rho * n_items as f64;
    let rounded = exact.round();
    if (exact - rounded).abs() > 1e-9 || rounded < 0.0 {
        return Err(Error::NonIntegerCapacity { rho, n_items });
    }
    Ok(rounded as usize)
}

fn block_seed(seed_base: u64, block: u64, n_realizations: usize) -> u64 {
    seed_base.wrapping_add(block.wrapping_mul(n_realizations as u64))
}

/// Advertised-share sweep over a capacity-ratio grid for several pressures.
///
/// Each `(pressure, rho)` point is simulated with its own seed block and
/// paired with the analytic expectation, using the gamma approximation
/// except at capacity 1 where gamma is exactly zero. Records are ordered
/// pressures-outer, ratios-inner.
pub fn sweep_rho(
    base: &ModelParams,
    rho_grid: &[f64],
    pressures: &[f64],
    n_realizations: usize,
    seed_base: u64,
) -> Result<Vec<ExperimentRecord>> {
    let mut records = Vec::with_capacity(rho_grid.len() * pressures.len());
    let mut block = 0u64;
    for &pressure in pressures {
        for &rho in rho_grid {
            let mut params = base.clone();
            params.capacity = capacity_for_rho(rho, base.n_items)?;
            params.pressure = pressure;
            params.gamma_policy = if params.capacity == 1 {
                GammaPolicy::ExactM1
            } else {
                GammaPolicy::Approximation
            };
            params.validate()?;
            let point_seed = block_seed(seed_base, block, n_realizations);
            block += 1;
            let stats = run_ensemble(&params, n_realizations, point_seed)?;
            let analytic_f_a = Some(expected_advertised_share(&params)?);
            records.push(ExperimentRecord {
                rho: params.rho(),
                params,
                stats,
                analytic_f_a,
                seed_base: point_seed,
            });
        }
    }
    Ok(records)
}

/// Advertised share at several item counts relative to the reference count
/// `base.n_items`, at fixed pressure.
///
/// The capacity at each `(n_items, rho)` point is `round(rho * n_items)`.
/// Reference ensembles run first (one seed block per ratio), then the
/// requested item counts in order; a count equal to the reference reuses the
/// reference ensembles, making its relative share exactly 1.
pub fn item_size_experiment(
    base: &ModelParams,
    item_counts: &[usize],
    rho_grid: &[f64],
    pressure: f64,
    n_realizations: usize,
    seed_base: u64,
) -> Result<Vec<ItemSizeRow>> {
    let reference_items = base.n_items;
    let mut block = 0u64;

    let mut reference: Vec<(f64, ShareStats)> = Vec::with_capacity(rho_grid.len());
    for &rho in rho_grid {
        let mut params = base.clone();
        params.pressure = pressure;
        params.capacity = (rho * reference_items as f64).round() as usize;
        params.validate()?;
        let stats = run_ensemble(
            &params,
            n_realizations,
            block_seed(seed_base, block, n_realizations),
        )?;
        block += 1;
        reference.push((rho, stats));
    }

    let mut rows = Vec::with_capacity(item_counts.len() * rho_grid.len());
    for &n_items in item_counts {
        for (ri, &rho) in rho_grid.iter().enumerate() {
            let mut params = base.clone();
            params.n_items = n_items;
            params.pressure = pressure;
            params.capacity = (rho * n_items as f64).round() as usize;
            params.validate()?;
            let (stats, point_seed) = if n_items == reference_items {
                (
                    reference[ri].1.clone(),
                    block_seed(seed_base, ri as u64, n_realizations),
                )
            } else {
                let point_seed = block_seed(seed_base, block, n_realizations);
                block += 1;
                (run_ensemble(&params, n_realizations, point_seed)?, point_seed)
            };
            let f_a_reference = reference[ri].1.f_a;
            if f_a_reference == 0.0 {
                return Err(Error::DivisionByZeroShare { rho, pressure });
            }
            rows.push(ItemSizeRow {
                rho,
                n_items,
                capacity: params.capacity,
                pressure,
                f_a: stats.f_a,
                f_a_reference,
                relative: stats.f_a / f_a_reference,
                seed_base: point_seed,
            });
        }
    }
    Ok(rows)
}

/// Advertised share at several run lengths relative to a reference run
/// length, over a `(pressure, rho)` grid.
///
/// A point is flagged stationary when its relative share lies within
/// [`STATIONARITY_BAND`] of 1. For every `(pressure, rho)` pair the
/// reference ensemble runs first; a requested `nu` equal to the reference
/// reuses it.
pub fn stationarity_experiment(
    base: &ModelParams,
    nu_values: &[f64],
    reference_nu: f64,
    rho_grid: &[f64],
    pressures: &[f64],
    n_realizations: usize,
    seed_base: u64,
) -> Result<Vec<StationarityRow>> {
    let mut rows = Vec::with_capacity(nu_values.len() * rho_grid.len() * pressures.len());
    let mut block = 0u64;
    for &pressure in pressures {
        for &rho in rho_grid {
            let capacity = capacity_for_rho(rho, base.n_items)?;
            let mut params = base.clone();
            params.capacity = capacity;
            params.pressure = pressure;
            params.interactions_per_pair = reference_nu;
            params.validate()?;
            let reference_seed = block_seed(seed_base, block, n_realizations);
            block += 1;
            let reference_stats = run_ensemble(&params, n_realizations, reference_seed)?;
            if reference_stats.f_a == 0.0 {
                return Err(Error::DivisionByZeroShare { rho, pressure });
            }
            for &nu in nu_values {
                let (stats, point_seed) = if nu == reference_nu {
                    (reference_stats.clone(), reference_seed)
                } else {
                    let mut run_params = params.clone();
                    run_params.interactions_per_pair = nu;
                    run_params.validate()?;
                    let point_seed = block_seed(seed_base, block, n_realizations);
                    block += 1;
                    (run_ensemble(&run_params, n_realizations, point_seed)?, point_seed)
                };
                let relative = stats.f_a / reference_stats.f_a;
                rows.push(StationarityRow {
                    rho: params.rho(),
                    capacity,
                    pressure,
                    nu,
                    reference_nu,
                    f_a: stats.f_a,
                    f_a_reference: reference_stats.f_a,
                    relative,
                    stationary: (relative - 1.0).abs() <= STATIONARITY_BAND,
                    seed_base: point_seed,
                });
            }
        }
    }
    Ok(rows)
}
