//! `capcheck`: samples the capacity region in both directions. Forward,
//! comfortably interior rate points must be covered by a schedule found
//! within the search budget; reverse, points strictly inside any schedule's
//! asymptotic rate box must test as capacity-interior. Points closer to the
//! boundary than the margin floor are skipped and counted, since no bounded
//! schedule search can serve them.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde_json::json;

use macstab_core::{
    asymptotic_box, asymptotic_rates_limit, box_interior_contains, capacity_membership,
    schedule_for_rate, RateVector, RegionVerdict, Schedule,
};

use crate::commands::sampler;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::record::ResultRecord;

const MARGIN_FLOOR: f64 = 0.01;
const SCHEDULE_BUDGET: u32 = 64;
const RETRY_CAP: u32 = 100_000;

#[derive(Debug, Args)]
pub struct CapcheckArgs {
    /// Experiment configuration file (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Points to sample in each direction.
    #[arg(long, default_value_t = 100)]
    pub samples: u32,
    /// Seed for the sampled points (required when samples > 0).
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run(args: &CapcheckArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let config = ExperimentConfig::load(&args.config)?;
    let channel = config.channel()?;
    let j = channel.transmitters();

    if args.samples == 0 {
        return ResultRecord::new(
            "capcheck",
            config.digest(),
            args.seed,
            json!({
                "forward": { "samples": 0, "pass": 0, "fail": 0, "skipped_near_boundary": 0 },
                "reverse": { "samples": 0, "pass": 0, "fail": 0 },
                "margin_floor": MARGIN_FLOOR,
            }),
            started,
        )
        .print();
    }
    let seed = args
        .seed
        .ok_or_else(|| CliError::Usage("--seed is required when sampling points".to_string()))?;
    let mut unif = sampler(seed);

    let axis_caps: Vec<f64> = (0..j)
        .map(|q| channel.subset_capacity(1 << q))
        .collect::<Result<_, _>>()?;

    // Forward direction: rejection-sample interior points in the bounding
    // box, then demand a covering schedule.
    let mut attempts = 0u32;
    let mut skipped = 0u64;
    let mut forward_pass = 0u64;
    let mut forward_fail = 0u64;
    let mut worst_forward = f64::INFINITY;
    let mut accepted = 0;
    while accepted < args.samples {
        attempts += 1;
        if attempts > RETRY_CAP {
            return Err(CliError::Outside(format!(
                "could not sample {} interior points within {RETRY_CAP} attempts",
                args.samples
            )));
        }
        let point: Vec<f64> = axis_caps.iter().map(|c| c * unif()).collect();
        let r = RateVector::nats_per_channel_use(point)?;
        let check = capacity_membership(&r, &channel)?;
        if check.verdict != RegionVerdict::InsideInterior {
            continue;
        }
        if check.margin < MARGIN_FLOOR {
            skipped += 1;
            continue;
        }
        accepted += 1;
        let epsilon = check.margin / (2.0 * j as f64);
        match schedule_for_rate(&r, &channel, epsilon, SCHEDULE_BUDGET) {
            Ok(s) => {
                let rates = asymptotic_rates_limit(&channel, &s)?;
                let margin = rates
                    .iter()
                    .zip(r.values())
                    .map(|(got, want)| got - want)
                    .fold(f64::INFINITY, f64::min);
                if margin > 0.0 {
                    forward_pass += 1;
                    worst_forward = worst_forward.min(margin);
                } else {
                    forward_fail += 1;
                }
            }
            Err(_) => forward_fail += 1,
        }
    }

    // Reverse direction: points strictly inside sampled schedule boxes must
    // sit strictly inside the capacity region.
    let mut reverse_pass = 0u64;
    let mut reverse_fail = 0u64;
    let mut worst_reverse = f64::INFINITY;
    for _ in 0..args.samples {
        let counts: Vec<u32> = loop {
            let c: Vec<u32> = (0..j)
                .map(|_| (unif() * (config.k + 1) as f64) as u32)
                .collect();
            let total: u32 = c.iter().sum();
            if total >= 1 && total <= config.k {
                break c;
            }
        };
        let s = Schedule::new(counts);
        let corner = asymptotic_box(&s, &channel)?;
        let point: Vec<f64> = corner
            .values()
            .iter()
            .map(|c| c * (0.05 + 0.9 * unif()))
            .collect();
        let x = RateVector::nats_per_channel_use(point)?;
        let inside_box = box_interior_contains(&corner, &x)?;
        let check = capacity_membership(&x, &channel)?;
        if inside_box && check.verdict == RegionVerdict::InsideInterior {
            reverse_pass += 1;
            worst_reverse = worst_reverse.min(check.margin);
        } else {
            reverse_fail += 1;
        }
    }

    let outputs = json!({
        "forward": {
            "samples": args.samples,
            "pass": forward_pass,
            "fail": forward_fail,
            "skipped_near_boundary": skipped,
            "worst_margin": if forward_pass > 0 { Some(worst_forward) } else { None },
        },
        "reverse": {
            "samples": args.samples,
            "pass": reverse_pass,
            "fail": reverse_fail,
            "worst_margin": if reverse_pass > 0 { Some(worst_reverse) } else { None },
        },
        "margin_floor": MARGIN_FLOOR,
        "schedule_budget": SCHEDULE_BUDGET,
    });
    ResultRecord::new("capcheck", config.digest(), Some(seed), outputs, started).print()?;

    if forward_fail > 0 || reverse_fail > 0 {
        return Err(CliError::Outside(format!(
            "capacity check failed: {forward_fail} forward and {reverse_fail} reverse failures"
        )));
    }
    Ok(())
}
