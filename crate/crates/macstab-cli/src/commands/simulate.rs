//! `simulate`: runs the slotted queueing chain, reports the stability
//! verdict and flow statistics, and optionally writes the decimated series.
//! A sweep section in the config expands into one run per grid value, each
//! with its own derived seed, merged in grid order.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde_json::{json, Value};

use macstab_core::{run as run_chain, RunOptions, SimStats};

use crate::commands::verdict_label;
use crate::config::ExperimentConfig;
use crate::csvout::write_series;
use crate::error::CliError;
use crate::record::ResultRecord;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Experiment configuration file (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Horizon in slots, overriding the config's run section.
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Seed, overriding the config's run section.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the decimated backlog/workload series to this CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn resolve_horizon(config: &ExperimentConfig, args: &SimulateArgs) -> Result<u64, CliError> {
    args.horizon
        .or_else(|| config.run.as_ref().map(|r| r.horizon))
        .ok_or_else(|| CliError::Usage("a horizon is required (run section or --horizon)".to_string()))
}

fn resolve_seed(config: &ExperimentConfig, args: &SimulateArgs) -> Result<u64, CliError> {
    args.seed
        .or_else(|| config.run.as_ref().and_then(|r| r.seed))
        .ok_or_else(|| CliError::Usage("an explicit seed is required (run section or --seed)".to_string()))
}

fn options(config: &ExperimentConfig, horizon: u64, seed: u64) -> Result<RunOptions, CliError> {
    if horizon == 0 {
        return Err(CliError::Usage("horizon must be at least one slot".to_string()));
    }
    let mut opts = RunOptions::new(horizon, seed);
    if let Some(points) = config.run.as_ref().and_then(|r| r.decimation) {
        opts = opts.with_series_points(points);
    }
    Ok(opts)
}

fn execute(config: &ExperimentConfig, horizon: u64, seed: u64) -> Result<SimStats, CliError> {
    let catalog = config.catalog()?;
    let (policy, _) = config.policy_spec(&catalog)?;
    let arrivals = config.arrival_model()?;
    let opts = options(config, horizon, seed)?;
    Ok(run_chain(&policy, &arrivals, &catalog, &opts)?)
}

fn stats_json(config: &ExperimentConfig, stats: &SimStats) -> Result<Value, CliError> {
    let j = config.transmitters();
    let model = config.arrival_model()?;
    let mut out = json!({
        "horizon": stats.horizon,
        "verdict": verdict_label(stats.verdict),
        "final_half_slope": stats.final_half_slope,
        "time_avg_backlog": stats.time_avg_backlog,
        "last_half_avg_backlog": stats.last_half_avg_backlog,
        "last_quarter_avg_backlog": stats.last_quarter_avg_backlog,
        "queue_arrival_rates": (0..j).map(|q| stats.queue_arrival_rate(q)).collect::<Vec<_>>(),
        "queue_departure_rates": (0..j).map(|q| stats.queue_departure_rate(q)).collect::<Vec<_>>(),
        "digest": format!("{:016x}", stats.digest),
        "invariant_violations": stats.invariant_violations,
    });
    if let Some(lambda) = config.lambda_per_second(&model) {
        out["lambda_per_second"] = json!(lambda);
    }
    Ok(out)
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let config = ExperimentConfig::load(&args.config)?;
    let horizon = resolve_horizon(&config, args)?;
    let base_seed = resolve_seed(&config, args)?;

    if let Some(sweep) = config.sweep.clone() {
        if args.out.is_some() {
            return Err(CliError::Usage(
                "--out is only available for single runs, not sweeps".to_string(),
            ));
        }
        let mut entries = Vec::with_capacity(sweep.values.len());
        for (index, &value) in sweep.values.iter().enumerate() {
            let derived = config.apply_sweep_value(value)?;
            let seed = base_seed + index as u64;
            let stats = execute(&derived, horizon, seed)?;
            let mut entry = stats_json(&derived, &stats)?;
            entry["value"] = json!(value);
            entry["seed"] = json!(seed);
            entries.push(entry);
        }
        return ResultRecord::new(
            "simulate",
            config.digest(),
            Some(base_seed),
            json!({ "sweep": { "parameter": sweep.parameter, "entries": entries } }),
            started,
        )
        .print();
    }

    let stats = execute(&config, horizon, base_seed)?;
    let mut outputs = stats_json(&config, &stats)?;
    if let Some(path) = &args.out {
        let rows = write_series(path, &stats)?;
        outputs["series_out"] = json!(path.display().to_string());
        outputs["series_rows"] = json!(rows);
    }
    ResultRecord::new("simulate", config.digest(), Some(base_seed), outputs, started).print()
}
