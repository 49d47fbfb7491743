//! `policy`: reports an explicit schedule distribution or synthesizes one
//! for a target arrival-rate vector, with its splitting matrix and the
//! long-run service rates it sustains.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde_json::json;

use macstab_core::{outer_bound_membership, psi, RateVector};

use crate::commands::parse_list;
use crate::config::{ExperimentConfig, PolicyOrigin, PolicySection};
use crate::error::CliError;
use crate::record::ResultRecord;

#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// Experiment configuration file (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Target arrival rates (messages per slot), overriding the config's
    /// policy section, e.g. `0.1,0.1`.
    #[arg(long)]
    pub rate: Option<String>,
}

pub fn run(args: &PolicyArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(text) = &args.rate {
        let target = parse_list::<f64>(text, "rate")?;
        if target.len() != config.transmitters() {
            return Err(CliError::Usage(format!(
                "rate has {} entries but the system has {}",
                target.len(),
                config.transmitters()
            )));
        }
        config.policy = Some(PolicySection { probabilities: None, target: Some(target) });
    }

    let catalog = config.catalog()?;
    let (policy, origin) = config.policy_spec(&catalog)?;
    let rates = psi(&policy, &catalog);

    let mut outputs = json!({
        "probabilities": policy.probabilities(),
        "mu": (0..catalog.transmitters()).map(|q| policy.mu(q).to_vec()).collect::<Vec<_>>(),
        "psi": rates.values(),
    });
    match &origin {
        PolicyOrigin::Explicit => {
            outputs["origin"] = json!("explicit");
        }
        PolicyOrigin::Synthesized { target } => {
            let check = outer_bound_membership(
                &RateVector::messages_per_slot(target.clone())?,
                &catalog,
            )?;
            outputs["origin"] = json!("synthesized");
            outputs["target"] = json!(target);
            outputs["margin"] = json!(check.margin);
            if target.iter().all(|&t| t == 0.0) {
                outputs["warning"] = json!("degenerate target: zero rate vector");
            }
        }
    }

    let model = config.arrival_model()?;
    if !config.arrivals.is_empty() {
        let means: Vec<f64> = (0..model.queue_count()).map(|q| model.mean(q)).collect();
        outputs["arrival_means"] = json!(means);
        outputs["service_margins"] = json!(rates
            .values()
            .iter()
            .zip(means.iter())
            .map(|(r, a)| r - a)
            .collect::<Vec<_>>());
    }
    if let Some(lambda) = config.lambda_per_second(&model) {
        outputs["lambda_per_second"] = json!(lambda);
    }

    ResultRecord::new("policy", config.digest(), None, outputs, started).print()
}
