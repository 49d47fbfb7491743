//! State-independent scheduling policies and the class-splitting they
//! induce on arrivals.
//!
//! A policy draws one schedule per slot from a fixed distribution `p` over a
//! catalog. Arriving messages at queue `j` are assigned a class (the
//! schedule that will eventually carry them) according to the split
//! distribution
//!
//! ```text
//! mu_j(s) = p(s) * s_j / N(s)  /  sum_{s'} p(s') * s'_j / N(s')
//! ```
//!
//! which weighs each schedule by the long-run rate at which it serves queue
//! `j`. The per-queue service rate of the policy is
//! `psi_j = sum_s p(s) * s_j / N(s)`.

use alloc::{vec, vec::Vec};

use crate::catalog::{ClassId, ScheduleCatalog};
use crate::region::{RateVector, RegionError};

/// A schedule distribution together with its per-queue split distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySpec {
    p: Vec<f64>,
    /// `mu[queue][schedule]`; a row of zeros marks a queue the policy never
    /// serves.
    mu: Vec<Vec<f64>>,
}

impl PolicySpec {
    /// Builds a policy from a dense probability vector over catalog indices.
    ///
    /// Entries must be non-negative and the serving mass must not exceed 1;
    /// whatever the serving schedules do not use is assigned to the idle
    /// schedule, overriding any idle entry passed in. Queues that no
    /// positive-probability schedule serves get an all-zero split row; use
    /// [`split_distribution`] when that should be an error.
    pub fn from_probabilities(p: &[f64], catalog: &ScheduleCatalog) -> Result<Self, RegionError> {
        if p.len() != catalog.len() {
            return Err(RegionError::InvalidPolicy(
                "probability vector length does not match the catalog",
            ));
        }
        if p.iter().any(|&v| !v.is_finite() || v < -1e-12) {
            return Err(RegionError::InvalidPolicy("probabilities must be non-negative"));
        }
        let mut dense = vec![0.0; catalog.len()];
        let mut serving_mass = 0.0;
        for idx in catalog.serving_indices() {
            let v = p[idx].max(0.0);
            dense[idx] = v;
            serving_mass += v;
        }
        if serving_mass > 1.0 + 1e-9 {
            return Err(RegionError::InvalidPolicy("probabilities sum to more than 1"));
        }
        dense[catalog.idle_index()] = (1.0 - serving_mass).max(0.0);

        let j_count = catalog.transmitters();
        let mut mu = vec![vec![0.0; catalog.len()]; j_count];
        for (q, row) in mu.iter_mut().enumerate() {
            let mut total = 0.0;
            for idx in catalog.serving_indices() {
                let w = dense[idx] * catalog.service_rates(idx)[q];
                row[idx] = w;
                total += w;
            }
            if total > 0.0 {
                for v in row.iter_mut() {
                    *v /= total;
                }
            } else {
                for v in row.iter_mut() {
                    *v = 0.0;
                }
            }
        }
        Ok(Self { p: dense, mu })
    }

    /// All probability on one serving schedule.
    pub fn point_mass(idx: usize, catalog: &ScheduleCatalog) -> Result<Self, RegionError> {
        if idx >= catalog.len() {
            return Err(RegionError::InvalidPolicy("schedule index out of range"));
        }
        let mut p = vec![0.0; catalog.len()];
        p[idx] = 1.0;
        Self::from_probabilities(&p, catalog)
    }

    /// Schedule distribution, dense over catalog indices.
    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn probability(&self, idx: usize) -> f64 {
        self.p[idx]
    }

    /// Split distribution of queue `queue` over catalog indices.
    pub fn mu(&self, queue: usize) -> &[f64] {
        &self.mu[queue]
    }

    pub fn mu_value(&self, class: ClassId) -> f64 {
        self.mu[class.queue][class.schedule]
    }

    /// Queues whose split row is all zero (the policy never serves them).
    pub fn unserved_queues(&self) -> Vec<usize> {
        self.mu
            .iter()
            .enumerate()
            .filter(|(_, row)| row.iter().all(|&v| v == 0.0))
            .map(|(q, _)| q)
            .collect()
    }

    pub fn queue_count(&self) -> usize {
        self.mu.len()
    }
}

/// Builds a policy and requires that every queue is served by some
/// positive-probability schedule, so that every split row is a proper
/// distribution.
pub fn split_distribution(p: &[f64], catalog: &ScheduleCatalog) -> Result<PolicySpec, RegionError> {
    let policy = PolicySpec::from_probabilities(p, catalog)?;
    if let Some(&queue) = policy.unserved_queues().first() {
        return Err(RegionError::UnservedQueue { queue });
    }
    Ok(policy)
}

/// Long-run service rate per queue, `psi_j = sum_s p(s) * s_j / N(s)`, in
/// messages per slot.
pub fn psi(policy: &PolicySpec, catalog: &ScheduleCatalog) -> RateVector {
    let mut out = vec![0.0; catalog.transmitters()];
    for idx in catalog.serving_indices() {
        let p = policy.probability(idx);
        if p > 0.0 {
            for (o, v) in out.iter_mut().zip(catalog.service_rates(idx)) {
                *o += p * v;
            }
        }
    }
    RateVector::messages_per_slot(out).expect("service rates are finite and non-negative")
}
