//! Drift diagnostics for the simulated chain.
//!
//! Each class `(s, j)` carries the weighted workload
//! `c_js = N(s) * n_js + s_j * t_js` (fresh messages weighted by their full
//! service requirement, in-flight ones by the remaining slots). The scalar
//! `c = 1 + sum c_js` is the workload the stability notion speaks about, and
//!
//! ```text
//! V = sum_js c_js^2 / (2 * (p(s) s_j - EA_js N(s)))
//! ```
//!
//! is the quadratic potential whose one-step drift certifies stability
//! whenever every per-class service margin `p(s) s_j - EA_js N(s)` is
//! positive, with `EA_js` the split arrival rate of the class. The
//! [`empirical_drift`] probe estimates `E[dV]` by Monte Carlo to check
//! `E[dV] <= -c + b` numerically.

use alloc::vec::Vec;

use crate::arrivals::ArrivalModel;
use crate::catalog::{ClassId, ScheduleCatalog};
use crate::math;
use crate::policy::PolicySpec;
use crate::rng::RngStreams;
use crate::sim::{step, SimError, SystemState};

/// `c(state) = 1 + sum_js (N(s) n_js + s_j t_js)`.
pub fn weighted_backlog(state: &SystemState, catalog: &ScheduleCatalog) -> u64 {
    let mut total = 1u64;
    for idx in catalog.serving_indices() {
        let s = catalog.schedule(idx);
        let n = catalog.length(idx).expect("serving schedule has a length");
        let ongoing = state.ongoing[idx].as_ref();
        for q in 0..catalog.transmitters() {
            if s.count(q) == 0 {
                continue;
            }
            total += n * state.fresh[idx][q];
            if let Some(t) = ongoing {
                if t.in_flight[q] > 0 {
                    total += s.count(q) as u64 * t.remaining;
                }
            }
        }
    }
    total
}

/// Quadratic potential of a state.
///
/// Classes with no mass contribute nothing and need no margin; a class that
/// holds mass while its service margin is not positive makes the potential
/// meaningless and is reported as an error.
pub fn quadratic_potential(
    state: &SystemState,
    policy: &PolicySpec,
    arrivals: &ArrivalModel,
    catalog: &ScheduleCatalog,
) -> Result<f64, SimError> {
    let j_count = catalog.transmitters();
    if arrivals.queue_count() != j_count
        || policy.queue_count() != j_count
        || state.fresh.len() != catalog.len()
    {
        return Err(SimError::DimensionMismatch);
    }
    let mut total = 0.0;
    for idx in catalog.serving_indices() {
        let s = catalog.schedule(idx);
        let n = catalog.length(idx).expect("serving schedule has a length");
        let ongoing = state.ongoing[idx].as_ref();
        for q in 0..j_count {
            if s.count(q) == 0 {
                continue;
            }
            let mut c_js = n * state.fresh[idx][q];
            if let Some(t) = ongoing {
                if t.in_flight[q] > 0 {
                    c_js += s.count(q) as u64 * t.remaining;
                }
            }
            if c_js == 0 {
                continue;
            }
            let class = ClassId { schedule: idx, queue: q };
            let split_rate = arrivals.mean(q) * policy.mu_value(class);
            let margin = policy.probability(idx) * s.count(q) as f64 - split_rate * n as f64;
            if margin <= 0.0 {
                return Err(SimError::DriftConditionViolated { schedule: idx, queue: q });
            }
            let c = c_js as f64;
            total += c * c / (2.0 * margin);
        }
    }
    Ok(total)
}

/// Geometric potential `1 - theta^(N(s) n_js + x_js t_js)` of one class,
/// used to probe transient behaviour.
pub fn transience_witness(
    state: &SystemState,
    class: ClassId,
    catalog: &ScheduleCatalog,
    theta: f64,
) -> Result<f64, SimError> {
    if !(theta.is_finite() && 0.0 < theta && theta < 1.0) {
        return Err(SimError::ThetaOutOfRange);
    }
    if class.schedule >= catalog.len()
        || class.queue >= catalog.transmitters()
        || catalog.schedule(class.schedule).count(class.queue) == 0
    {
        return Err(SimError::InvalidClass { schedule: class.schedule, queue: class.queue });
    }
    let n = catalog.length(class.schedule).expect("serving schedule has a length");
    let (flying, remaining) = state.in_flight(class);
    let exponent = n * state.fresh_count(class) + flying * remaining;
    Ok(1.0 - math::pow(theta, exponent as f64))
}

/// One-step drift estimate at one probe state.
#[derive(Debug, Clone, Copy)]
pub struct DriftEstimate {
    /// Workload `c` of the probe state.
    pub c_alpha: u64,
    /// Monte Carlo mean of `V(next) - V(probe)`.
    pub mean_delta_v: f64,
    /// Standard error of that mean.
    pub std_error: f64,
    /// Monte Carlo mean of `c(next) - c(probe)`.
    pub mean_delta_c: f64,
}

/// Monte Carlo estimate of the one-step potential drift at each probe state.
///
/// Every probe gets its own disjoint block of random streams derived from
/// `seed`, so results do not depend on probe order or count.
pub fn empirical_drift(
    probes: &[SystemState],
    policy: &PolicySpec,
    arrivals: &ArrivalModel,
    catalog: &ScheduleCatalog,
    reps: u32,
    seed: u64,
) -> Result<Vec<DriftEstimate>, SimError> {
    if reps < 1000 {
        return Err(SimError::InsufficientReps { reps });
    }
    let mut out = Vec::with_capacity(probes.len());
    for (i, probe) in probes.iter().enumerate() {
        let v0 = quadratic_potential(probe, policy, arrivals, catalog)?;
        let c0 = weighted_backlog(probe, catalog);
        let mut streams = RngStreams::with_stream_base(seed, i as u64 * 4);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut sum_dc = 0.0;
        for _ in 0..reps {
            let mut state = probe.clone();
            step(&mut state, policy, arrivals, catalog, &mut streams)?;
            let dv = quadratic_potential(&state, policy, arrivals, catalog)? - v0;
            sum += dv;
            sum_sq += dv * dv;
            sum_dc += weighted_backlog(&state, catalog) as f64 - c0 as f64;
        }
        let n = reps as f64;
        let mean = sum / n;
        let variance = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        out.push(DriftEstimate {
            c_alpha: c0,
            mean_delta_v: mean,
            std_error: math::sqrt(variance / n),
            mean_delta_c: sum_dc / n,
        });
    }
    Ok(out)
}

/// Smallest `b` with `mean_delta_v <= -c_alpha + b` across all estimates.
pub fn drift_offset(estimates: &[DriftEstimate]) -> f64 {
    estimates
        .iter()
        .map(|e| e.mean_delta_v + e.c_alpha as f64)
        .fold(f64::NEG_INFINITY, f64::max)
}
