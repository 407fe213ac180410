//! Subcommand implementations: merge settings, run, write CSV.

use srmwa::analytic::{build_rates, stationary};
use srmwa::error::Error;
use srmwa::experiments::{item_size_experiment, stationarity_experiment, sweep_rho};
use srmwa::model::{GammaPolicy, ModelParams};
use srmwa::sim;

use crate::config::{
    parse_gamma_policy, required, resolve_capacity, validated, AnalyticArgs, Cli, Command,
    ConfigFile, ItemSizeArgs, SimulateArgs, StationarityArgs, SweepCommand, SweepRhoArgs,
    DEFAULT_AGENTS, DEFAULT_ITEMS, DEFAULT_ITEM_COUNTS, DEFAULT_NU, DEFAULT_PRESSURES,
    DEFAULT_REALIZATIONS, DEFAULT_REFERENCE_NU, DEFAULT_RHO_GRID, DEFAULT_SEED,
};
use crate::csv;
use crate::CliError;

/// Routes a parsed command line to its implementation.
pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Analytic(args) => cmd_analytic(args),
        Command::Sweep(SweepCommand::Rho(args)) => cmd_sweep_rho(args),
        Command::Sweep(SweepCommand::ItemSize(args)) => cmd_item_size(args),
        Command::Sweep(SweepCommand::Stationarity(args)) => cmd_stationarity(args),
    }
}

/// Parameter problems exit 2; everything that can only surface while
/// computing exits 1.
fn classify(e: Error) -> CliError {
    match e {
        Error::CapacityExceedsItems { .. }
        | Error::TooFewAgents { .. }
        | Error::PressureOutOfRange { .. }
        | Error::NonPositiveCount { .. }
        | Error::GammaOutOfRange { .. }
        | Error::PolicyMismatch { .. }
        | Error::NonIntegerCapacity { .. } => CliError::Config(e.to_string()),
        other => CliError::Run(other.to_string()),
    }
}

fn setup_jobs(jobs: Option<usize>) {
    if let Some(threads) = jobs {
        // Ignore failure: the global pool can only be sized once.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let file = ConfigFile::load(args.config.as_ref())?;
    file.ensure_only(&[
        "agents", "items", "capacity", "rho", "pressure", "nu", "seed", "out",
        "trajectory-out", "sample-every",
    ])?;
    let agents = file
        .scalar("agents", args.agents, Some(DEFAULT_AGENTS))?
        .unwrap();
    let items = file.scalar("items", args.items, Some(DEFAULT_ITEMS))?.unwrap();
    // A capacity-family flag overrides both file keys.
    let (capacity_opt, rho_opt) = if args.capacity.is_some() || args.rho.is_some() {
        (args.capacity, args.rho)
    } else {
        (
            file.scalar("capacity", None, None)?,
            file.scalar("rho", None, None)?,
        )
    };
    let capacity = resolve_capacity(capacity_opt, rho_opt, items)?;
    let pressure = required(file.scalar("pressure", args.pressure, None)?, "pressure")?;
    let nu = file.scalar("nu", args.nu, Some(DEFAULT_NU))?.unwrap();
    let seed = file.scalar("seed", args.seed, Some(DEFAULT_SEED))?.unwrap();
    let out = required(file.scalar("out", args.out, None)?, "out")?;
    let trajectory_out = file.scalar("trajectory-out", args.trajectory_out, None)?;
    let sample_every = file.scalar("sample-every", args.sample_every, None)?;

    let mut params = ModelParams::new(agents, items, capacity, pressure);
    params.interactions_per_pair = nu;
    let params = validated(params)?;

    let sampling = match (&trajectory_out, sample_every) {
        (Some(_), Some(0)) => {
            return Err(CliError::Config("--sample-every must be positive".into()));
        }
        (Some(_), Some(every)) => Some(every),
        (Some(_), None) => Some((agents * agents) as u64),
        (None, Some(_)) => {
            return Err(CliError::Config(
                "--sample-every needs --trajectory-out".into(),
            ));
        }
        (None, None) => None,
    };

    let outcome = sim::run(&params, seed, sampling).map_err(classify)?;
    csv::write_shares(&out, &params, seed, &outcome.final_state)?;
    if let Some(traj_path) = trajectory_out {
        csv::write_trajectory(
            &traj_path,
            &params,
            seed,
            outcome.trajectory.as_deref().unwrap_or(&[]),
        )?;
    }
    Ok(())
}

fn cmd_analytic(args: AnalyticArgs) -> Result<(), CliError> {
    let file = ConfigFile::load(args.config.as_ref())?;
    file.ensure_only(&[
        "agents", "items", "capacity", "rho", "pressure", "gamma-policy", "out",
    ])?;
    let agents = file
        .scalar("agents", args.agents, Some(DEFAULT_AGENTS))?
        .unwrap();
    let items = file.scalar("items", args.items, Some(DEFAULT_ITEMS))?.unwrap();
    let (capacity_opt, rho_opt) = if args.capacity.is_some() || args.rho.is_some() {
        (args.capacity, args.rho)
    } else {
        (
            file.scalar("capacity", None, None)?,
            file.scalar("rho", None, None)?,
        )
    };
    let capacity = resolve_capacity(capacity_opt, rho_opt, items)?;
    let pressure = required(file.scalar("pressure", args.pressure, None)?, "pressure")?;
    let policy = file
        .scalar("gamma-policy", args.gamma_policy, None)?
        .map(|raw: String| parse_gamma_policy(&raw))
        .transpose()?
        .unwrap_or(GammaPolicy::Approximation);
    let out = required(file.scalar("out", args.out, None)?, "out")?;

    let mut params = ModelParams::new(agents, items, capacity, pressure);
    params.gamma_policy = policy;
    let params = validated(params)?;

    let rates = build_rates(&params).map_err(classify)?;
    let distribution = stationary(&rates).map_err(classify)?;
    let expected = distribution.mean() / params.n_agents as f64;
    csv::write_analytic(&out, &params, &rates, &distribution, expected)
}

fn cmd_sweep_rho(args: SweepRhoArgs) -> Result<(), CliError> {
    let file = ConfigFile::load(args.config.as_ref())?;
    file.ensure_only(&[
        "agents", "items", "rhos", "pressures", "nu", "realizations", "seed", "jobs", "out",
    ])?;
    setup_jobs(file.scalar("jobs", args.jobs, None)?);
    let agents = file
        .scalar("agents", args.agents, Some(DEFAULT_AGENTS))?
        .unwrap();
    let items = file.scalar("items", args.items, Some(DEFAULT_ITEMS))?.unwrap();
    let rhos = file
        .list("rhos", args.rhos, Some(DEFAULT_RHO_GRID.to_vec()))?
        .unwrap();
    let pressures = file
        .list("pressures", args.pressures, Some(DEFAULT_PRESSURES.to_vec()))?
        .unwrap();
    let nu = file.scalar("nu", args.nu, Some(DEFAULT_NU))?.unwrap();
    let realizations = file
        .scalar("realizations", args.realizations, Some(DEFAULT_REALIZATIONS))?
        .unwrap();
    let seed = file.scalar("seed", args.seed, Some(DEFAULT_SEED))?.unwrap();
    let out = required(file.scalar("out", args.out, None)?, "out")?;

    let mut base = ModelParams::new(agents, items, 1, 0.0);
    base.interactions_per_pair = nu;
    let base = validated(base)?;

    let records = sweep_rho(&base, &rhos, &pressures, realizations, seed).map_err(classify)?;
    csv::write_rho_sweep(&out, &records)
}

fn cmd_item_size(args: ItemSizeArgs) -> Result<(), CliError> {
    let file = ConfigFile::load(args.config.as_ref())?;
    file.ensure_only(&[
        "agents", "items", "reference-items", "rhos", "pressure", "nu", "realizations",
        "seed", "jobs", "out",
    ])?;
    setup_jobs(file.scalar("jobs", args.jobs, None)?);
    let agents = file
        .scalar("agents", args.agents, Some(DEFAULT_AGENTS))?
        .unwrap();
    let item_counts = file
        .list("items", args.items, Some(DEFAULT_ITEM_COUNTS.to_vec()))?
        .unwrap();
    let reference_items = file
        .scalar("reference-items", args.reference_items, Some(DEFAULT_ITEMS))?
        .unwrap();
    let rhos = file
        .list("rhos", args.rhos, Some(DEFAULT_RHO_GRID.to_vec()))?
        .unwrap();
    let pressure = required(file.scalar("pressure", args.pressure, None)?, "pressure")?;
    let nu = file.scalar("nu", args.nu, Some(DEFAULT_NU))?.unwrap();
    let realizations = file
        .scalar("realizations", args.realizations, Some(DEFAULT_REALIZATIONS))?
        .unwrap();
    let seed = file.scalar("seed", args.seed, Some(DEFAULT_SEED))?.unwrap();
    let out = required(file.scalar("out", args.out, None)?, "out")?;

    let mut base = ModelParams::new(agents, reference_items, 1, pressure);
    base.interactions_per_pair = nu;
    let base = validated(base)?;

    let rows = item_size_experiment(&base, &item_counts, &rhos, pressure, realizations, seed)
        .map_err(classify)?;
    csv::write_item_size(&out, &rows)
}

fn cmd_stationarity(args: StationarityArgs) -> Result<(), CliError> {
    let file = ConfigFile::load(args.config.as_ref())?;
    file.ensure_only(&[
        "agents", "items", "nus", "reference-nu", "rhos", "pressures", "realizations",
        "seed", "jobs", "out",
    ])?;
    setup_jobs(file.scalar("jobs", args.jobs, None)?);
    let agents = file
        .scalar("agents", args.agents, Some(DEFAULT_AGENTS))?
        .unwrap();
    let items = file.scalar("items", args.items, Some(DEFAULT_ITEMS))?.unwrap();
    let nus = required(file.list("nus", args.nus, None)?, "nus")?;
    let reference_nu = file
        .scalar("reference-nu", args.reference_nu, Some(DEFAULT_REFERENCE_NU))?
        .unwrap();
    let rhos = file
        .list("rhos", args.rhos, Some(DEFAULT_RHO_GRID.to_vec()))?
        .unwrap();
    let pressures = file
        .list("pressures", args.pressures, Some(DEFAULT_PRESSURES.to_vec()))?
        .unwrap();
    let realizations = file
        .scalar("realizations", args.realizations, Some(DEFAULT_REALIZATIONS))?
        .unwrap();
    let seed = file.scalar("seed", args.seed, Some(DEFAULT_SEED))?.unwrap();
    let out = required(file.scalar("out", args.out, None)?, "out")?;

    let mut base = ModelParams::new(agents, items, 1, 0.0);
    base.interactions_per_pair = reference_nu;
    let base = validated(base)?;

    let rows = stationarity_experiment(
        &base,
        &nus,
        reference_nu,
        &rhos,
        &pressures,
        realizations,
        seed,
    )
    .map_err(classify)?;
    csv::write_stationarity(&out, &rows)
}
