//! Maps library errors onto the documented process exit codes:
//! 2 usage or configuration, 3 infeasible or outside a region,
//! 4 unreachable reliability, 5 I/O.

use macstab_core::{CodingError, RegionError, SimError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Outside(String),
    #[error("{0}")]
    Unreachable(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Outside(_) => 3,
            CliError::Unreachable(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl From<CodingError> for CliError {
    fn from(e: CodingError) -> Self {
        match e {
            CodingError::UnreachableReliability { .. } | CodingError::LengthCapExceeded { .. } => {
                CliError::Unreachable(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<RegionError> for CliError {
    fn from(e: RegionError) -> Self {
        match e {
            RegionError::OutsideStabilityRegion { .. }
            | RegionError::OutsideCapacityRegion { .. }
            | RegionError::ScheduleBudgetExceeded { .. }
            | RegionError::UnservedQueue { .. } => CliError::Outside(e.to_string()),
            RegionError::Coding(inner) => inner.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::UnservedQueue { .. } | SimError::DriftConditionViolated { .. } => {
                CliError::Outside(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
