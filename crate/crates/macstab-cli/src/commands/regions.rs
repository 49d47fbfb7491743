//! `regions`: the schedule catalog with its service and asymptotic rates,
//! plus boundary radii of the stability outer bound (messages per slot) and
//! the capacity region (nats per channel use) along a set of directions.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde_json::json;

use macstab_core::{capacity_radius, outer_bound_radius};

use crate::commands::{parse_list, sampler};
use crate::config::ExperimentConfig;
use crate::csvout::write_regions;
use crate::error::CliError;
use crate::record::ResultRecord;

#[derive(Debug, Args)]
pub struct RegionsArgs {
    /// Experiment configuration file (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// CSV output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of extra sampled directions (requires --seed when positive).
    #[arg(long, default_value_t = 0)]
    pub samples: u32,
    /// Seed for the sampled directions.
    #[arg(long)]
    pub seed: Option<u64>,
    /// One extra direction as comma-separated components, e.g. `0.7,0.3`.
    #[arg(long)]
    pub direction: Option<String>,
}

pub fn run(args: &RegionsArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let config = ExperimentConfig::load(&args.config)?;
    let catalog = config.catalog()?;
    let channel = config.channel()?;
    let j = catalog.transmitters();

    let mut directions: Vec<Vec<f64>> = Vec::new();
    for axis in 0..j {
        let mut d = vec![0.0; j];
        d[axis] = 1.0;
        directions.push(d);
    }
    let diagonal = 1.0 / (j as f64).sqrt();
    directions.push(vec![diagonal; j]);
    if let Some(text) = &args.direction {
        let d = parse_list::<f64>(text, "direction")?;
        if d.len() != j {
            return Err(CliError::Usage(format!(
                "direction has {} components but the system has {j}",
                d.len()
            )));
        }
        directions.push(d);
    }
    if args.samples > 0 {
        let seed = args.seed.ok_or_else(|| {
            CliError::Usage("--seed is required when sampling directions".to_string())
        })?;
        let mut unif = sampler(seed);
        for _ in 0..args.samples {
            let raw: Vec<f64> = (0..j).map(|_| 0.05 + 0.95 * unif()).collect();
            let norm = raw.iter().map(|d| d * d).sum::<f64>().sqrt();
            directions.push(raw.iter().map(|d| d / norm).collect());
        }
    }

    let mut boundary = Vec::with_capacity(2 * directions.len());
    for d in &directions {
        boundary.push(("outer", d.clone(), outer_bound_radius(d, &catalog)?));
        boundary.push(("capacity", d.clone(), capacity_radius(d, &channel)?));
    }

    let (catalog_rows, boundary_rows) = write_regions(&args.out, &catalog, &boundary)?;
    ResultRecord::new(
        "regions",
        config.digest(),
        args.seed,
        json!({
            "out": args.out.display().to_string(),
            "catalog_rows": catalog_rows,
            "boundary_rows": boundary_rows,
            "directions": directions.len(),
        }),
        started,
    )
    .print()
}
