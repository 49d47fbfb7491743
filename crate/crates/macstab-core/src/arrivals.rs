//! Batch arrival processes, one independent process per queue.
//!
//! Each slot every queue receives an i.i.d. batch of messages; the four
//! supported batch laws cover the usual test cases and all have the finite
//! second moments the drift diagnostics need.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::math;
use crate::rng;
use crate::sim::SimError;

/// Distribution of the per-slot batch size of one queue.
#[derive(Debug, Clone, PartialEq)]
pub enum BatchDistribution {
    /// One message with probability `q`, none otherwise.
    Bernoulli { q: f64 },
    /// Poisson with mean `lambda`.
    Poisson { lambda: f64 },
    /// Exactly `batch` messages every slot.
    Deterministic { batch: u64 },
    /// `P(batch = i) = probs[i]`.
    FinitePmf { probs: Vec<f64> },
}

impl BatchDistribution {
    pub fn validate(&self) -> Result<(), SimError> {
        match self {
            Self::Bernoulli { q } => {
                if !(q.is_finite() && (0.0..=1.0).contains(q)) {
                    return Err(SimError::InvalidArrival("Bernoulli probability must lie in [0, 1]"));
                }
            }
            Self::Poisson { lambda } => {
                if !(lambda.is_finite() && *lambda >= 0.0) {
                    return Err(SimError::InvalidArrival("Poisson mean must be non-negative"));
                }
            }
            Self::Deterministic { .. } => {}
            Self::FinitePmf { probs } => {
                if probs.is_empty() {
                    return Err(SimError::InvalidArrival("pmf must not be empty"));
                }
                if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(SimError::InvalidArrival("pmf entries must be non-negative"));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(SimError::InvalidArrival("pmf must sum to 1"));
                }
            }
        }
        Ok(())
    }

    /// Mean batch size.
    pub fn mean(&self) -> f64 {
        match self {
            Self::Bernoulli { q } => *q,
            Self::Poisson { lambda } => *lambda,
            Self::Deterministic { batch } => *batch as f64,
            Self::FinitePmf { probs } => {
                probs.iter().enumerate().map(|(i, p)| i as f64 * p).sum()
            }
        }
    }

    /// Second moment of the batch size.
    pub fn second_moment(&self) -> f64 {
        match self {
            Self::Bernoulli { q } => *q,
            Self::Poisson { lambda } => lambda * (lambda + 1.0),
            Self::Deterministic { batch } => (*batch as f64) * (*batch as f64),
            Self::FinitePmf { probs } => {
                probs.iter().enumerate().map(|(i, p)| (i * i) as f64 * p).sum()
            }
        }
    }

    fn sample(&self, rng: &mut impl RngCore) -> u64 {
        match self {
            Self::Bernoulli { q } => u64::from(rng::uniform(rng) < *q),
            Self::Poisson { lambda } => {
                // Multiplicative counting: the number of uniforms whose
                // running product stays above exp(-lambda).
                let floor = math::exp(-lambda);
                let mut count = 0u64;
                let mut product = 1.0;
                loop {
                    product *= rng::uniform(rng);
                    if product <= floor {
                        return count;
                    }
                    count += 1;
                }
            }
            Self::Deterministic { batch } => *batch,
            Self::FinitePmf { probs } => rng::sample_index(probs, rng) as u64,
        }
    }
}

/// The per-queue batch distributions of a system.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalModel {
    queues: Vec<BatchDistribution>,
}

impl ArrivalModel {
    pub fn new(queues: Vec<BatchDistribution>) -> Result<Self, SimError> {
        if queues.is_empty() {
            return Err(SimError::InvalidArrival("at least one queue required"));
        }
        for q in &queues {
            q.validate()?;
        }
        Ok(Self { queues })
    }

    /// No arrivals anywhere; useful for draining experiments.
    pub fn silent(queue_count: usize) -> Self {
        Self {
            queues: alloc::vec![BatchDistribution::Deterministic { batch: 0 }; queue_count],
        }
    }

    pub fn queue_count(&self) -> usize {
        self.queues.len()
    }

    pub fn distribution(&self, queue: usize) -> &BatchDistribution {
        &self.queues[queue]
    }

    /// Mean batch size of one queue, messages per slot.
    pub fn mean(&self, queue: usize) -> f64 {
        self.queues[queue].mean()
    }

    pub fn second_moment(&self, queue: usize) -> f64 {
        self.queues[queue].second_moment()
    }

    pub(crate) fn sample(&self, queue: usize, rng: &mut impl RngCore) -> u64 {
        self.queues[queue].sample(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStreams;
    use alloc::vec;

    #[test]
    fn moments() {
        assert_eq!(BatchDistribution::Bernoulli { q: 0.15 }.mean(), 0.15);
        assert_eq!(BatchDistribution::Bernoulli { q: 0.15 }.second_moment(), 0.15);
        assert_eq!(BatchDistribution::Poisson { lambda: 2.0 }.mean(), 2.0);
        assert_eq!(BatchDistribution::Poisson { lambda: 2.0 }.second_moment(), 6.0);
        assert_eq!(BatchDistribution::Deterministic { batch: 3 }.mean(), 3.0);
        assert_eq!(BatchDistribution::Deterministic { batch: 3 }.second_moment(), 9.0);
        let pmf = BatchDistribution::FinitePmf { probs: vec![0.5, 0.25, 0.25] };
        assert!((pmf.mean() - 0.75).abs() < 1e-15);
        assert!((pmf.second_moment() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(BatchDistribution::Bernoulli { q: 1.5 }.validate().is_err());
        assert!(BatchDistribution::Poisson { lambda: -1.0 }.validate().is_err());
        assert!(BatchDistribution::FinitePmf { probs: vec![] }.validate().is_err());
        assert!(BatchDistribution::FinitePmf { probs: vec![0.5, 0.4] }.validate().is_err());
        assert!(BatchDistribution::FinitePmf { probs: vec![0.5, 0.5] }.validate().is_ok());
        assert!(ArrivalModel::new(vec![]).is_err());
    }

    #[test]
    fn empirical_means_track_theory() {
        let mut streams = RngStreams::from_seed(11);
        let cases = [
            BatchDistribution::Bernoulli { q: 0.3 },
            BatchDistribution::Poisson { lambda: 1.7 },
            BatchDistribution::Deterministic { batch: 2 },
            BatchDistribution::FinitePmf { probs: vec![0.2, 0.5, 0.3] },
        ];
        for dist in cases {
            let n = 200_000u64;
            let mut sum = 0u64;
            let mut sum_sq = 0u64;
            for _ in 0..n {
                let v = dist.sample(&mut streams.arrivals);
                sum += v;
                sum_sq += v * v;
            }
            let mean = sum as f64 / n as f64;
            let m2 = sum_sq as f64 / n as f64;
            assert!(
                (mean - dist.mean()).abs() < 0.02,
                "{dist:?}: mean {mean} vs {}",
                dist.mean()
            );
            assert!(
                (m2 - dist.second_moment()).abs() < 0.08,
                "{dist:?}: m2 {m2} vs {}",
                dist.second_moment()
            );
        }
    }

    #[test]
    fn silent_model_never_arrives() {
        let model = ArrivalModel::silent(2);
        let mut streams = RngStreams::from_seed(3);
        for q in 0..2 {
            for _ in 0..100 {
                assert_eq!(model.sample(q, &mut streams.arrivals), 0);
            }
        }
    }
}
