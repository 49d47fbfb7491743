//! `nlen`: codeword lengths, their closed-form bounds, and the error bound
//! just above and at the returned length.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde_json::json;

use macstab_core::{
    asymptotic_rates_fixed_rho, asymptotic_rates_limit, best_rho_on_grid, codeword_length,
    codeword_length_bounds, joint_error_bound, Schedule, DEFAULT_RHO_GRID,
};

use crate::commands::parse_schedule;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::record::ResultRecord;

#[derive(Debug, Args)]
pub struct NlenArgs {
    /// Experiment configuration file (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Single schedule as comma-separated counts, e.g. `1,0`; default is
    /// every serving schedule in the catalog.
    #[arg(long)]
    pub schedule: Option<String>,
    /// Also scan the built-in rho grid for the shortest codeword.
    #[arg(long)]
    pub scan_rho: bool,
}

pub fn run(args: &NlenArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let config = ExperimentConfig::load(&args.config)?;
    let coding = config.coding_config()?;

    let schedules: Vec<Schedule> = match &args.schedule {
        Some(text) => vec![parse_schedule(text, coding.transmitters())?],
        None => {
            let catalog = config.catalog()?;
            catalog
                .serving_indices()
                .map(|idx| catalog.schedule(idx).clone())
                .collect::<Vec<_>>()
        }
    };

    let mut rows = Vec::new();
    for s in &schedules {
        let n = codeword_length(&coding, s)?;
        let (lower, upper) = codeword_length_bounds(&coding, s)?;
        let chi_at_n = joint_error_bound(&coding, s, n)?;
        let chi_before = if n > 1 { Some(joint_error_bound(&coding, s, n - 1)?) } else { None };
        let fixed = asymptotic_rates_fixed_rho(coding.channel(), coding.rho(), s)?;
        let limit = asymptotic_rates_limit(coding.channel(), s)?;
        let mut row = json!({
            "schedule": s.to_string(),
            "n": n,
            "lower": lower,
            "upper": upper,
            "chi_at_n": chi_at_n,
            "chi_before": chi_before,
            "rates_fixed_rho": fixed,
            "rates_limit": limit,
        });
        if args.scan_rho {
            let (best_rho, best_n) = best_rho_on_grid(&coding, s, &DEFAULT_RHO_GRID)?;
            row["best_rho"] = json!({ "rho": best_rho, "n": best_n });
        }
        rows.push(row);
    }

    ResultRecord::new(
        "nlen",
        config.digest(),
        None,
        json!({ "pe": coding.pe(), "rho": coding.rho(), "schedules": rows }),
        started,
    )
    .print()
}
