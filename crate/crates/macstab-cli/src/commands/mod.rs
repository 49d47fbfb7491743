//! One module per subcommand plus shared argument parsing helpers.

pub mod capcheck;
pub mod nlen;
pub mod policy;
pub mod regions;
pub mod simulate;

use macstab_core::rng::uniform;
use macstab_core::{RngStreams, Schedule, StabilityVerdict};

use crate::error::CliError;

/// Parses a comma-separated count list like `1,0,2` into a schedule.
pub fn parse_schedule(text: &str, transmitters: usize) -> Result<Schedule, CliError> {
    let counts = parse_list::<u32>(text, "schedule")?;
    if counts.len() != transmitters {
        return Err(CliError::Usage(format!(
            "schedule lists {} transmitters but the configuration has {transmitters}",
            counts.len()
        )));
    }
    Ok(Schedule::new(counts))
}

/// Parses a comma-separated number list like `0.1,0.2`.
pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<T>()
                .map_err(|_| CliError::Usage(format!("cannot parse {what} entry {part:?}")))
        })
        .collect()
}

/// Deterministic uniform sampler for commands that draw their own randomness.
pub fn sampler(seed: u64) -> impl FnMut() -> f64 {
    let mut rng = RngStreams::from_seed(seed).arrivals;
    move || uniform(&mut rng)
}

pub fn verdict_label(verdict: StabilityVerdict) -> &'static str {
    match verdict {
        StabilityVerdict::StableLike => "stable-like",
        StabilityVerdict::TransientLike => "transient-like",
        StabilityVerdict::Inconclusive => "inconclusive",
    }
}
