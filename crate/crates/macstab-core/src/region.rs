//! Rate-region geometry: membership in the stability region spanned by a
//! schedule catalog, synthesis of stabilising policies, and the Gaussian
//! multi-access capacity region the whole construction converges to.
//!
//! Two regions appear throughout:
//!
//! * The **outer stability bound** of a catalog: arrival rate vectors
//!   (messages per slot) dominated by the service rates of some probability
//!   measure over the catalog's schedules. Membership is decided by a small
//!   linear program whose optimal value is the uniform slack `t`; its
//!   optimising measure doubles as the certificate and as the seed for
//!   policy synthesis.
//! * The **capacity region** of the channel: rate vectors (nats per channel
//!   use) satisfying `sum_{k in S} r_k <= ln(1 + sum_{k in S} P_k / sigma2)`
//!   for every non-empty transmitter subset `S`.
//!
//! Rate vectors carry their unit, and every operation checks it: confusing
//! messages per slot with nats per channel use is the one mistake this API
//! refuses to compile into a number.

use alloc::{vec, vec::Vec};

use crate::catalog::ScheduleCatalog;
use crate::coding::{
    asymptotic_rates_limit, codeword_length, ChannelParams, CodingConfig, CodingError, Schedule,
};
use crate::math;
use crate::policy::{psi, split_distribution, PolicySpec};
use crate::simplex::{self, LpError};

/// Absolute tolerance separating "boundary" from a strict verdict.
pub const REGION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateUnit {
    /// Long-run message throughput per queue, messages per slot.
    MessagesPerSlot,
    /// Information rate per channel use, nats.
    NatsPerChannelUse,
}

/// Errors reported by the catalog, policy and region layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegionError {
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error("catalog would hold {size} schedules, above the limit of {limit}")]
    CatalogTooLarge { size: u128, limit: u64 },
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error("queue {queue} is never served by a positive-probability schedule")]
    UnservedQueue { queue: usize },
    #[error("rate vector is tagged {found:?} where {expected:?} is required")]
    UnitMismatch { expected: RateUnit, found: RateUnit },
    #[error("rate vector has {rates} entries but the system has {expected}")]
    DimensionMismatch { rates: usize, expected: usize },
    #[error("target is not strictly inside the stability region (slack {margin:e})")]
    OutsideStabilityRegion { margin: f64 },
    #[error("rates are not strictly inside the capacity region (margin {margin:e})")]
    OutsideCapacityRegion { margin: f64 },
    #[error("no schedule with at most {k_max} total messages clears the target (best margin {best_margin:e})")]
    ScheduleBudgetExceeded { k_max: u32, best_margin: f64 },
    #[error("direction must be non-negative, finite, and not all zero")]
    BadDirection,
    #[error("policy probabilities invalid: {0}")]
    InvalidPolicy(&'static str),
    #[error("membership solver failed: {0}")]
    Solver(LpError),
}

/// A non-negative rate vector tagged with its unit.
#[derive(Debug, Clone, PartialEq)]
pub struct RateVector {
    values: Vec<f64>,
    unit: RateUnit,
}

impl RateVector {
    pub fn new(values: Vec<f64>, unit: RateUnit) -> Result<Self, RegionError> {
        if values.is_empty() {
            return Err(RegionError::InvalidInput("rate vector must not be empty"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(RegionError::InvalidInput("rates must be non-negative and finite"));
        }
        Ok(Self { values, unit })
    }

    pub fn messages_per_slot(values: Vec<f64>) -> Result<Self, RegionError> {
        Self::new(values, RateUnit::MessagesPerSlot)
    }

    pub fn nats_per_channel_use(values: Vec<f64>) -> Result<Self, RegionError> {
        Self::new(values, RateUnit::NatsPerChannelUse)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> RateUnit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn expect_unit(&self, expected: RateUnit) -> Result<(), RegionError> {
        if self.unit != expected {
            return Err(RegionError::UnitMismatch { expected, found: self.unit });
        }
        Ok(())
    }

    fn expect_len(&self, expected: usize) -> Result<(), RegionError> {
        if self.values.len() != expected {
            return Err(RegionError::DimensionMismatch { rates: self.values.len(), expected });
        }
        Ok(())
    }
}

/// Three-way answer of a membership test at tolerance [`REGION_TOL`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionVerdict {
    InsideInterior,
    Boundary,
    Outside,
}

fn verdict_from_margin(margin: f64) -> RegionVerdict {
    if margin > REGION_TOL {
        RegionVerdict::InsideInterior
    } else if margin < -REGION_TOL {
        RegionVerdict::Outside
    } else {
        RegionVerdict::Boundary
    }
}

// ---------------------------------------------------------------------------
// Stability region of a catalog
// ---------------------------------------------------------------------------

/// Result of testing arrival rates against a catalog's outer bound.
#[derive(Debug, Clone)]
pub struct OuterBoundCheck {
    pub verdict: RegionVerdict,
    /// Largest uniform slack `t` with `sum_s pi(s) v_j(s) >= beta_j + t` for
    /// all queues; positive inside, negative outside.
    pub margin: f64,
    /// The optimising probability measure over catalog indices.
    pub mixture: Vec<f64>,
}

/// Decides whether `beta` (messages per slot) lies inside, on, or outside
/// the region spanned by mixtures of the catalog's service rate vectors.
///
/// Solves `max t` over probability measures `pi` on the catalog subject to
/// `sum_s pi(s) v_j(s) >= beta_j + t` for every queue `j`.
pub fn outer_bound_membership(
    beta: &RateVector,
    catalog: &ScheduleCatalog,
) -> Result<OuterBoundCheck, RegionError> {
    beta.expect_unit(RateUnit::MessagesPerSlot)?;
    beta.expect_len(catalog.transmitters())?;

    let n_s = catalog.len();
    let j_count = catalog.transmitters();
    // Columns: pi over schedules, t+ and t- (t is free), one surplus per queue.
    let ncols = n_s + 2 + j_count;
    let mut rows = Vec::with_capacity(j_count + 1);
    let mut b = Vec::with_capacity(j_count + 1);
    for (q, &beta_q) in beta.values().iter().enumerate() {
        let mut row = vec![0.0; ncols];
        for idx in 0..n_s {
            row[idx] = catalog.service_rates(idx)[q];
        }
        row[n_s] = -1.0;
        row[n_s + 1] = 1.0;
        row[n_s + 2 + q] = -1.0;
        rows.push(row);
        b.push(beta_q);
    }
    let mut simplex_row = vec![0.0; ncols];
    for cell in simplex_row.iter_mut().take(n_s) {
        *cell = 1.0;
    }
    rows.push(simplex_row);
    b.push(1.0);

    let mut c = vec![0.0; ncols];
    c[n_s] = 1.0;
    c[n_s + 1] = -1.0;

    let sol = simplex::maximize(&c, &rows, &b).map_err(RegionError::Solver)?;
    let mixture: Vec<f64> = sol.x[..n_s].iter().map(|&v| v.max(0.0)).collect();
    Ok(OuterBoundCheck {
        verdict: verdict_from_margin(sol.objective),
        margin: sol.objective,
        mixture,
    })
}

/// Builds a policy whose service rate strictly dominates `target` in every
/// coordinate, or reports how far outside the region the target is.
///
/// The optimising measure of [`outer_bound_membership`] leaves its idle mass
/// unused; spreading that mass uniformly over the serving schedules only
/// adds service, so the strict slack certified by the membership program is
/// preserved.
pub fn synthesize_policy(
    target: &RateVector,
    catalog: &ScheduleCatalog,
) -> Result<PolicySpec, RegionError> {
    let check = outer_bound_membership(target, catalog)?;
    if check.verdict != RegionVerdict::InsideInterior {
        return Err(RegionError::OutsideStabilityRegion { margin: check.margin });
    }
    let mut p = check.mixture;
    let serving: Vec<usize> = catalog.serving_indices().collect();
    if serving.is_empty() {
        return Err(RegionError::InvalidInput("catalog has no serving schedule"));
    }
    let idle_mass = p[catalog.idle_index()];
    if idle_mass > 0.0 {
        let share = idle_mass / serving.len() as f64;
        for &idx in &serving {
            p[idx] += share;
        }
        p[catalog.idle_index()] = 0.0;
    }
    let policy = split_distribution(&p, catalog)?;
    let rates = psi(&policy, catalog);
    if rates.values().iter().zip(target.values()).any(|(r, t)| r <= t) {
        // Unreachable for a sound solver; never hand out a policy that does
        // not strictly dominate the target.
        return Err(RegionError::OutsideStabilityRegion { margin: check.margin });
    }
    Ok(policy)
}

/// Largest `radius >= 0` with `radius * direction` still inside the outer
/// stability bound.
pub fn outer_bound_radius(
    direction: &[f64],
    catalog: &ScheduleCatalog,
) -> Result<f64, RegionError> {
    check_direction(direction, catalog.transmitters())?;
    let n_s = catalog.len();
    let j_count = catalog.transmitters();
    // Columns: pi, radius, one surplus per queue; maximize radius subject to
    // sum_s pi(s) v_j(s) - d_j * radius - surplus_j = 0 and sum pi = 1.
    let ncols = n_s + 1 + j_count;
    let mut rows = Vec::with_capacity(j_count + 1);
    let mut b = Vec::with_capacity(j_count + 1);
    for (q, &d_q) in direction.iter().enumerate() {
        let mut row = vec![0.0; ncols];
        for idx in 0..n_s {
            row[idx] = catalog.service_rates(idx)[q];
        }
        row[n_s] = -d_q;
        row[n_s + 1 + q] = -1.0;
        rows.push(row);
        b.push(0.0);
    }
    let mut simplex_row = vec![0.0; ncols];
    for cell in simplex_row.iter_mut().take(n_s) {
        *cell = 1.0;
    }
    rows.push(simplex_row);
    b.push(1.0);
    let mut c = vec![0.0; ncols];
    c[n_s] = 1.0;
    let sol = simplex::maximize(&c, &rows, &b).map_err(RegionError::Solver)?;
    Ok(sol.objective.max(0.0))
}

// ---------------------------------------------------------------------------
// Capacity region of the channel
// ---------------------------------------------------------------------------

/// Result of testing nat rates against the capacity region.
#[derive(Debug, Clone)]
pub struct CapacityCheck {
    pub verdict: RegionVerdict,
    /// Smallest constraint slack `min_S (c_S - sum_{k in S} r_k)`.
    pub margin: f64,
    /// Subset mask attaining the smallest slack.
    pub binding_subset: u32,
}

/// Tests `r` (nats per channel use) against every subset constraint of the
/// Gaussian multi-access capacity region.
pub fn capacity_membership(
    r: &RateVector,
    channel: &ChannelParams,
) -> Result<CapacityCheck, RegionError> {
    r.expect_unit(RateUnit::NatsPerChannelUse)?;
    r.expect_len(channel.transmitters())?;
    let full = channel.full_mask();
    let mut margin = f64::INFINITY;
    let mut binding = 0u32;
    let mut sub = full;
    while sub != 0 {
        let mut sum = 0.0;
        for (k, &v) in r.values().iter().enumerate() {
            if sub & (1 << k) != 0 {
                sum += v;
            }
        }
        let slack = channel.subset_capacity(sub)? - sum;
        if slack < margin {
            margin = slack;
            binding = sub;
        }
        sub = (sub - 1) & full;
    }
    Ok(CapacityCheck { verdict: verdict_from_margin(margin), margin, binding_subset: binding })
}

/// Largest `radius >= 0` with `radius * direction` still inside the
/// capacity region: `min_S c_S / sum_{k in S} d_k` over subsets that the
/// direction loads.
pub fn capacity_radius(direction: &[f64], channel: &ChannelParams) -> Result<f64, RegionError> {
    check_direction(direction, channel.transmitters())?;
    let full = channel.full_mask();
    let mut radius = f64::INFINITY;
    let mut sub = full;
    while sub != 0 {
        let mut load = 0.0;
        for (k, &d) in direction.iter().enumerate() {
            if sub & (1 << k) != 0 {
                load += d;
            }
        }
        if load > 0.0 {
            radius = radius.min(channel.subset_capacity(sub)? / load);
        }
        sub = (sub - 1) & full;
    }
    debug_assert!(radius.is_finite());
    Ok(radius)
}

fn check_direction(direction: &[f64], expected: usize) -> Result<(), RegionError> {
    if direction.len() != expected {
        return Err(RegionError::DimensionMismatch { rates: direction.len(), expected });
    }
    if direction.iter().any(|d| !d.is_finite() || *d < 0.0)
        || direction.iter().all(|&d| d == 0.0)
    {
        return Err(RegionError::BadDirection);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Per-schedule asymptotic boxes and the schedule search
// ---------------------------------------------------------------------------

/// Corner of the asymptotic rate box of a schedule: the per-transmitter nat
/// rates sustained when alphabets grow with the codeword.
pub fn asymptotic_box(s: &Schedule, channel: &ChannelParams) -> Result<RateVector, RegionError> {
    let rates = asymptotic_rates_limit(channel, s)?;
    RateVector::nats_per_channel_use(rates)
}

/// Whether `x` lies in the interior of the box with the given corner, in the
/// sense that matters for rate boxes: strictly below the corner on every
/// coordinate the corner supports, exactly zero on every coordinate it does
/// not.
pub fn box_interior_contains(corner: &RateVector, x: &RateVector) -> Result<bool, RegionError> {
    corner.expect_unit(RateUnit::NatsPerChannelUse)?;
    x.expect_unit(RateUnit::NatsPerChannelUse)?;
    x.expect_len(corner.len())?;
    Ok(corner
        .values()
        .iter()
        .zip(x.values())
        .all(|(&c, &v)| if c > 0.0 { v < c } else { v == 0.0 }))
}

/// Per-queue threshold rates of a finite-alphabet system, in nats per slot:
/// `s_j ln M_j / N(s)`.
pub fn nat_rate_threshold(s: &Schedule, config: &CodingConfig) -> Result<RateVector, RegionError> {
    let n = codeword_length(config, s)?;
    let rates = s
        .counts()
        .iter()
        .zip(config.ln_alphabet())
        .map(|(&c, &ln_m)| c as f64 * ln_m / n as f64)
        .collect();
    RateVector::nats_per_channel_use(rates)
}

/// Finds a schedule whose asymptotic box strictly covers `r` (nats per
/// channel use), searching total message counts `1..=k_max` with
/// per-transmitter counts proportional to `r + epsilon`.
///
/// Requires `r` and `r + epsilon * 1` strictly inside the capacity region;
/// transmitters with `r_j = 0` are left out of the schedule entirely. If no
/// schedule within the budget clears the target, the error carries the best
/// margin seen.
pub fn schedule_for_rate(
    r: &RateVector,
    channel: &ChannelParams,
    epsilon: f64,
    k_max: u32,
) -> Result<Schedule, RegionError> {
    r.expect_unit(RateUnit::NatsPerChannelUse)?;
    r.expect_len(channel.transmitters())?;
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(RegionError::InvalidInput("epsilon must be positive"));
    }
    if k_max == 0 {
        return Err(RegionError::InvalidInput("k_max must be at least 1"));
    }
    let check = capacity_membership(r, channel)?;
    if check.verdict != RegionVerdict::InsideInterior {
        return Err(RegionError::OutsideCapacityRegion { margin: check.margin });
    }
    let bumped: Vec<f64> = r
        .values()
        .iter()
        .map(|&v| if v > 0.0 { v + epsilon } else { v })
        .collect();
    let bumped_check =
        capacity_membership(&RateVector::nats_per_channel_use(bumped.clone())?, channel)?;
    if bumped_check.verdict != RegionVerdict::InsideInterior {
        return Err(RegionError::OutsideCapacityRegion { margin: bumped_check.margin });
    }

    let j_count = channel.transmitters();
    let active: Vec<usize> = (0..j_count).filter(|&q| r.values()[q] > 0.0).collect();
    if active.is_empty() {
        // Nothing demands rate; the empty schedule covers it vacuously.
        return Ok(Schedule::new(vec![0; j_count]));
    }
    let total: f64 = active.iter().map(|&q| bumped[q]).sum();

    let mut best_margin = f64::NEG_INFINITY;
    for k in 1..=k_max {
        let mut counts = vec![0u32; j_count];
        for &q in &active {
            counts[q] = math::round(k as f64 * bumped[q] / total) as u32;
        }
        if counts.iter().all(|&c| c == 0) {
            continue;
        }
        let s = Schedule::new(counts);
        let rates = asymptotic_rates_limit(channel, &s)?;
        let margin = active
            .iter()
            .map(|&q| rates[q] - r.values()[q])
            .fold(f64::INFINITY, f64::min);
        if margin > 0.0 {
            return Ok(s);
        }
        best_margin = best_margin.max(margin);
    }
    Err(RegionError::ScheduleBudgetExceeded { k_max, best_margin })
}
