//! Output envelope: every command emits one JSON record to stdout so each
//! number is traceable to the config digest and seed that produced it.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::config::ARTIFACT_VERSION;
use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct ResultRecord {
    pub command: &'static str,
    pub config_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub outputs: Value,
    pub wall_clock_ms: u64,
    pub artifact_version: &'static str,
}

impl ResultRecord {
    pub fn new(
        command: &'static str,
        config_digest: String,
        seed: Option<u64>,
        outputs: Value,
        started: Instant,
    ) -> Self {
        Self {
            command,
            config_digest,
            seed,
            outputs,
            wall_clock_ms: started.elapsed().as_millis() as u64,
            artifact_version: ARTIFACT_VERSION,
        }
    }

    pub fn print(&self) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Io(format!("cannot serialize result: {e}")))?;
        println!("{text}");
        Ok(())
    }
}
