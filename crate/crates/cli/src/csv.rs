//! CSV emission and parsing.
//!
//! All files share one layout: optional `# key = value` metadata lines, a
//! mandatory header row, then data rows. Measured floats are written with 12
//! significant digits (scientific notation, decimal point, no separators);
//! echoed configuration values use the shortest lossless form. Output is a
//! pure function of the data, so identical runs produce byte-identical
//! files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use srmwa::analytic::{StationaryDistribution, TransitionRates};
use srmwa::experiments::{ExperimentRecord, ItemSizeRow, StationarityRow};
use srmwa::model::{GammaPolicy, ItemRef, MarketState, ModelParams};

use crate::CliError;

/// 12 significant digits for measured values.
pub fn fmt_float(x: f64) -> String {
    format!("{:.11e}", x)
}

fn fmt_policy(policy: GammaPolicy) -> String {
    match policy {
        GammaPolicy::ExactM1 => "exact-m1".to_string(),
        GammaPolicy::Approximation => "approx".to_string(),
        GammaPolicy::Fixed(v) => format!("fixed:{v}"),
    }
}

fn params_meta(out: &mut String, params: &ModelParams) {
    let _ = writeln!(out, "# agents = {}", params.n_agents);
    let _ = writeln!(out, "# items = {}", params.n_items);
    let _ = writeln!(out, "# capacity = {}", params.capacity);
    let _ = writeln!(out, "# pressure = {}", params.pressure);
    let _ = writeln!(out, "# nu = {}", params.interactions_per_pair);
    let _ = writeln!(out, "# gamma_policy = {}", fmt_policy(params.gamma_policy));
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Final per-item market shares of one run: regular items 1..I, then the
/// advertised item.
pub fn write_shares(
    path: &Path,
    params: &ModelParams,
    seed: u64,
    state: &MarketState,
) -> Result<(), CliError> {
    let mut out = String::new();
    params_meta(&mut out, params);
    let _ = writeln!(out, "# seed = {seed}");
    let _ = writeln!(out, "# recommendations = {}", state.recommendations_done());
    let _ = writeln!(out, "item,owners,share");
    for item in state.items() {
        let label = match item {
            ItemRef::Regular(ix) => ix.to_string(),
            ItemRef::Advertised => "advertised".to_string(),
        };
        let _ = writeln!(
            out,
            "{label},{},{}",
            state.owner_count(item),
            fmt_float(state.market_share(item))
        );
    }
    write_file(path, &out)
}

/// Sampled advertised-share trajectory of one run.
pub fn write_trajectory(
    path: &Path,
    params: &ModelParams,
    seed: u64,
    trajectory: &[(u64, f64)],
) -> Result<(), CliError> {
    let mut out = String::new();
    params_meta(&mut out, params);
    let _ = writeln!(out, "# seed = {seed}");
    let _ = writeln!(out, "step,f_a");
    for &(step, f_a) in trajectory {
        let _ = writeln!(out, "{step},{}", fmt_float(f_a));
    }
    write_file(path, &out)
}

/// Chain analysis of one parameter set: per-state rates and stationary
/// probabilities, with gamma and the expected advertised share in the
/// metadata.
pub fn write_analytic(
    path: &Path,
    params: &ModelParams,
    rates: &TransitionRates,
    distribution: &StationaryDistribution,
    expected_share: f64,
) -> Result<(), CliError> {
    let mut out = String::new();
    params_meta(&mut out, params);
    let _ = writeln!(out, "# gamma = {}", fmt_float(*rates.gamma_used()));
    let _ = writeln!(out, "# e_f_a = {}", fmt_float(expected_share));
    let _ = writeln!(out, "state,up,down,stay,pi");
    for i in 0..=rates.n_agents() {
        let _ = writeln!(
            out,
            "{i},{},{},{},{}",
            fmt_float(rates.up()[i]),
            fmt_float(rates.down()[i]),
            fmt_float(rates.stay()[i]),
            fmt_float(distribution.pi()[i])
        );
    }
    write_file(path, &out)
}

/// Capacity-ratio sweep rows, one per (pressure, rho) grid point.
pub fn write_rho_sweep(path: &Path, records: &[ExperimentRecord]) -> Result<(), CliError> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "rho,capacity,pressure,nu,realizations,f_a_sim_mean,f_a_sim_std,f_a_analytic,f_top5,f_min,seed_base"
    );
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_float(r.rho),
            r.params.capacity,
            fmt_float(r.params.pressure),
            fmt_float(r.params.interactions_per_pair),
            r.stats.n_realizations,
            fmt_float(r.stats.f_a),
            fmt_float(r.stats.std_f_a),
            fmt_float(r.analytic_f_a.unwrap_or(f64::NAN)),
            fmt_float(r.stats.f_top),
            fmt_float(r.stats.f_min),
            r.seed_base
        );
    }
    write_file(path, &out)
}

/// Item-count experiment rows.
pub fn write_item_size(path: &Path, rows: &[ItemSizeRow]) -> Result<(), CliError> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "n_items,rho,capacity,pressure,f_a,f_a_reference,relative,seed_base"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n_items,
            fmt_float(r.rho),
            r.capacity,
            fmt_float(r.pressure),
            fmt_float(r.f_a),
            fmt_float(r.f_a_reference),
            fmt_float(r.relative),
            r.seed_base
        );
    }
    write_file(path, &out)
}

/// Run-length experiment rows; `stationary` is 0/1.
pub fn write_stationarity(path: &Path, rows: &[StationarityRow]) -> Result<(), CliError> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "rho,capacity,pressure,nu,reference_nu,f_a,f_a_reference,relative,stationary,seed_base"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_float(r.rho),
            r.capacity,
            fmt_float(r.pressure),
            fmt_float(r.nu),
            fmt_float(r.reference_nu),
            fmt_float(r.f_a),
            fmt_float(r.f_a_reference),
            fmt_float(r.relative),
            u8::from(r.stationary),
            r.seed_base
        );
    }
    write_file(path, &out)
}

/// A parsed CSV: metadata, header and rows of raw fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: BTreeMap<String, String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// A named column parsed as floats.
    pub fn column(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let ix = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Run(format!("no column named {name:?}")))?;
        self.rows
            .iter()
            .map(|row| {
                row[ix]
                    .parse::<f64>()
                    .map_err(|_| CliError::Run(format!("non-numeric value {:?} in {name}", row[ix])))
            })
            .collect()
    }
}

/// Reads back any CSV written by this module.
pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut meta = BTreeMap::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                meta.insert(key.trim().to_string(), value.trim().to_string());
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.to_string()).collect();
        match &header {
            None => header = Some(fields),
            Some(h) => {
                if fields.len() != h.len() {
                    return Err(CliError::Run(format!(
                        "row width {} does not match header width {}",
                        fields.len(),
                        h.len()
                    )));
                }
                rows.push(fields);
            }
        }
    }
    Ok(Table {
        meta,
        header: header.ok_or_else(|| CliError::Run("empty CSV: no header row".into()))?,
        rows,
    })
}
