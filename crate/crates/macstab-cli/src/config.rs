//! Experiment configuration: a JSON document covering the channel and code
//! parameters, the schedule budget, arrivals, the policy, and run controls.
//! Every command loads one file, validates it, and works from the parsed form;
//! the SHA-256 digest of the canonical re-serialization ties output records
//! back to their inputs.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use macstab_core::{
    enumerate_schedules, synthesize_policy, ArrivalModel, BatchDistribution, ChannelParams,
    CodingConfig, PolicySpec, RateVector, ScheduleCatalog,
};

use crate::error::CliError;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

// ---------------------------------------------------------------------------
// Document shape
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub coding: CodingSection,
    /// Schedule budget: the catalog holds every schedule with at most this
    /// many messages in total.
    pub k: u32,
    /// Optional bandwidth in Hz; slots last 1/W seconds, so arrival rates in
    /// messages per second are W times the per-slot means.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arrivals: Vec<ArrivalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

/// Channel and code parameters. Alphabet sizes come either as integers (`m`)
/// or directly as natural logarithms (`ln_m`) for very large alphabets;
/// exactly one of the two must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodingSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ln_m: Option<Vec<f64>>,
    /// Received power per transmitter, in units of the noise variance below.
    pub p: Vec<f64>,
    pub sigma2: f64,
    pub rho: f64,
    pub pe: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArrivalSpec {
    Bernoulli { q: f64 },
    Poisson { lambda: f64 },
    Deterministic { batch: u64 },
    FinitePmf { probs: Vec<f64> },
}

/// Either an explicit schedule distribution (catalog order, idle first) or a
/// target arrival-rate vector to synthesize a policy for; exactly one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub horizon: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// How many evenly spaced time-series points to keep (default 10000).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decimation: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Replace the tilting parameter `rho` (changes codeword lengths).
    Rho,
    /// Multiply every queue's arrival intensity by the value.
    ArrivalScale,
}

// ---------------------------------------------------------------------------
// Loading and validation
// ---------------------------------------------------------------------------

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("cannot parse {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let usage = |msg: &str| Err(CliError::Usage(msg.to_string()));
        let j = self.coding.p.len();
        match (&self.coding.m, &self.coding.ln_m) {
            (Some(m), None) if m.len() == j => {}
            (None, Some(l)) if l.len() == j => {}
            (Some(_), Some(_)) => return usage("coding: give either m or ln_m, not both"),
            (None, None) => return usage("coding: one of m or ln_m is required"),
            _ => return usage("coding: alphabet list length must match the power list"),
        }
        if self.k == 0 {
            return usage("k must be at least 1");
        }
        if let Some(w) = self.w {
            if !(w.is_finite() && w > 0.0) {
                return usage("w must be positive and finite");
            }
        }
        if !self.arrivals.is_empty() && self.arrivals.len() != j {
            return usage("arrivals must list one distribution per transmitter");
        }
        if let Some(policy) = &self.policy {
            match (&policy.probabilities, &policy.target) {
                (Some(_), None) | (None, Some(_)) => {}
                _ => return usage("policy: give exactly one of probabilities or target"),
            }
            if let Some(target) = &policy.target {
                if target.len() != j {
                    return usage("policy.target must have one rate per transmitter");
                }
            }
        }
        if let Some(run) = &self.run {
            if run.decimation == Some(0) {
                return usage("run.decimation must be at least 1");
            }
            let _ = run.horizon;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return usage("sweep.values must not be empty");
            }
            if sweep.values.iter().any(|v| !v.is_finite()) {
                return usage("sweep.values must be finite");
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical re-serialization; stable across reordered or
    /// differently formatted input documents.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(&canonical);
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn transmitters(&self) -> usize {
        self.coding.p.len()
    }

    // -- conversions into library types ------------------------------------

    pub fn channel(&self) -> Result<ChannelParams, CliError> {
        Ok(ChannelParams::new(self.coding.p.clone(), self.coding.sigma2)?)
    }

    pub fn coding_config(&self) -> Result<CodingConfig, CliError> {
        let channel = self.channel()?;
        let config = match (&self.coding.m, &self.coding.ln_m) {
            (Some(m), _) => CodingConfig::new(m, channel, self.coding.rho, self.coding.pe)?,
            (_, Some(ln_m)) => {
                CodingConfig::from_ln_alphabets(ln_m.clone(), channel, self.coding.rho, self.coding.pe)?
            }
            _ => unreachable!("validated"),
        };
        Ok(config)
    }

    pub fn catalog(&self) -> Result<ScheduleCatalog, CliError> {
        Ok(enumerate_schedules(&self.coding_config()?, self.k)?)
    }

    /// The arrival model; an absent `arrivals` section means silence.
    pub fn arrival_model(&self) -> Result<ArrivalModel, CliError> {
        if self.arrivals.is_empty() {
            return Ok(ArrivalModel::silent(self.transmitters()));
        }
        let queues: Vec<BatchDistribution> =
            self.arrivals.iter().map(ArrivalSpec::to_distribution).collect();
        Ok(ArrivalModel::new(queues)?)
    }

    /// Arrival rates in messages per second, defined only when `w` is set:
    /// exactly `w` times each queue's per-slot mean.
    pub fn lambda_per_second(&self, model: &ArrivalModel) -> Option<Vec<f64>> {
        self.w
            .map(|w| (0..model.queue_count()).map(|q| w * model.mean(q)).collect())
    }

    /// Builds the policy the config asks for, reporting how it came to be.
    pub fn policy_spec(
        &self,
        catalog: &ScheduleCatalog,
    ) -> Result<(PolicySpec, PolicyOrigin), CliError> {
        let section = self
            .policy
            .as_ref()
            .ok_or_else(|| CliError::Usage("a policy section is required".to_string()))?;
        if let Some(probs) = &section.probabilities {
            let policy = PolicySpec::from_probabilities(probs, catalog)?;
            return Ok((policy, PolicyOrigin::Explicit));
        }
        let target = section.target.as_ref().expect("validated");
        let rate = RateVector::messages_per_slot(target.clone())?;
        let policy = synthesize_policy(&rate, catalog)?;
        Ok((policy, PolicyOrigin::Synthesized { target: target.clone() }))
    }

    /// One grid step of the sweep: a copy of this config with the swept
    /// parameter replaced.
    pub fn apply_sweep_value(&self, value: f64) -> Result<ExperimentConfig, CliError> {
        let sweep = self.sweep.as_ref().expect("caller checked");
        let mut out = self.clone();
        out.sweep = None;
        match sweep.parameter {
            SweepParameter::Rho => out.coding.rho = value,
            SweepParameter::ArrivalScale => {
                if !(value.is_finite() && value >= 0.0) {
                    return Err(CliError::Usage("arrival scale must be non-negative".to_string()));
                }
                for spec in &mut out.arrivals {
                    *spec = spec.scaled(value)?;
                }
            }
        }
        out.validate()?;
        Ok(out)
    }
}

impl ArrivalSpec {
    pub fn to_distribution(&self) -> BatchDistribution {
        match self {
            ArrivalSpec::Bernoulli { q } => BatchDistribution::Bernoulli { q: *q },
            ArrivalSpec::Poisson { lambda } => BatchDistribution::Poisson { lambda: *lambda },
            ArrivalSpec::Deterministic { batch } => {
                BatchDistribution::Deterministic { batch: *batch }
            }
            ArrivalSpec::FinitePmf { probs } => {
                BatchDistribution::FinitePmf { probs: probs.clone() }
            }
        }
    }

    fn scaled(&self, factor: f64) -> Result<ArrivalSpec, CliError> {
        match self {
            ArrivalSpec::Bernoulli { q } => {
                let scaled = q * factor;
                if scaled > 1.0 {
                    return Err(CliError::Usage(format!(
                        "scaled bernoulli intensity {scaled} exceeds 1"
                    )));
                }
                Ok(ArrivalSpec::Bernoulli { q: scaled })
            }
            ArrivalSpec::Poisson { lambda } => Ok(ArrivalSpec::Poisson { lambda: lambda * factor }),
            ArrivalSpec::Deterministic { .. } | ArrivalSpec::FinitePmf { .. } => {
                Err(CliError::Usage(
                    "arrival_scale sweeps support only bernoulli and poisson queues".to_string(),
                ))
            }
        }
    }
}

/// How the policy in use was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyOrigin {
    Explicit,
    Synthesized { target: Vec<f64> },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_json() -> &'static str {
        r#"{
            "coding": { "m": [2, 2], "p": [3.0, 3.0], "sigma2": 1.0, "rho": 1.0, "pe": 0.01 },
            "k": 2,
            "w": 1000.0,
            "arrivals": [
                { "kind": "bernoulli", "q": 0.1 },
                { "kind": "poisson", "lambda": 0.05 }
            ],
            "policy": { "target": [0.1, 0.1] },
            "run": { "horizon": 1000, "seed": 7 }
        }"#
    }

    #[test]
    fn round_trips_through_canonical_serialization() {
        let parsed: ExperimentConfig = serde_json::from_str(sample_json()).unwrap();
        parsed.validate().unwrap();
        let canonical = serde_json::to_string(&parsed).unwrap();
        let reparsed: ExperimentConfig = serde_json::from_str(&canonical).unwrap();
        assert_eq!(parsed, reparsed);
        assert_eq!(parsed.digest(), reparsed.digest());
    }

    #[test]
    fn digest_tracks_content_not_formatting() {
        let parsed: ExperimentConfig = serde_json::from_str(sample_json()).unwrap();
        let spaced = serde_json::to_string_pretty(&parsed).unwrap();
        let reparsed: ExperimentConfig = serde_json::from_str(&spaced).unwrap();
        assert_eq!(parsed.digest(), reparsed.digest());

        let mut changed = parsed.clone();
        changed.coding.rho = 0.5;
        assert_ne!(parsed.digest(), changed.digest());
    }

    #[test]
    fn rejects_ambiguous_alphabets_and_policies() {
        let mut config: ExperimentConfig = serde_json::from_str(sample_json()).unwrap();
        config.coding.ln_m = Some(vec![0.7, 0.7]);
        assert!(matches!(config.validate(), Err(CliError::Usage(_))));

        let mut config: ExperimentConfig = serde_json::from_str(sample_json()).unwrap();
        config.policy = Some(PolicySection { probabilities: None, target: None });
        assert!(matches!(config.validate(), Err(CliError::Usage(_))));
    }

    #[test]
    fn sweep_scaling_rewrites_arrivals() {
        let mut config: ExperimentConfig = serde_json::from_str(sample_json()).unwrap();
        config.sweep = Some(SweepSection {
            parameter: SweepParameter::ArrivalScale,
            values: vec![0.5],
        });
        let scaled = config.apply_sweep_value(0.5).unwrap();
        assert_eq!(scaled.arrivals[0], ArrivalSpec::Bernoulli { q: 0.05 });
        assert_eq!(scaled.arrivals[1], ArrivalSpec::Poisson { lambda: 0.025 });
        assert!(scaled.sweep.is_none());
    }

    #[test]
    fn lambda_reporting_is_exactly_w_times_the_mean() {
        let config: ExperimentConfig = serde_json::from_str(sample_json()).unwrap();
        let model = config.arrival_model().unwrap();
        let lambda = config.lambda_per_second(&model).unwrap();
        assert_eq!(lambda, vec![1000.0 * 0.1, 1000.0 * 0.05]);
    }
}
