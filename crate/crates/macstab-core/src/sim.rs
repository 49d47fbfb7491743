//! Slotted discrete-time Markov chain of the queueing system.
//!
//! State per schedule class `(s, j)`: the number of fresh messages waiting,
//! plus at most one transmission in flight per schedule, described by its
//! message composition and remaining slots. One slot advances as:
//!
//! 1. batches arrive at every queue and each message is assigned a class by
//!    the policy's split distribution (same-slot service allowed);
//! 2. the policy draws a schedule `s`;
//! 3. if `s` has a transmission in flight, that transmission advances one
//!    slot and departs when its countdown reaches zero;
//! 4. otherwise, if `s` has fresh messages, it starts a new transmission
//!    carrying `min(fresh, s_j)` messages per queue for `N(s)` slots, the
//!    current slot included;
//! 5. otherwise the slot is idle.
//!
//! A transmission always occupies the full `N(s)` of its class schedule,
//! even when fewer messages than scheduled are on board. Runs are
//! reproducible: all randomness comes from [`RngStreams`], and a digest of
//! the event stream is part of the statistics.

use alloc::{vec, vec::Vec};

use crate::arrivals::ArrivalModel;
use crate::catalog::{ClassId, ScheduleCatalog};
use crate::policy::PolicySpec;
use crate::rng::{sample_index, RngStreams};

/// Least-squares backlog slope (messages per slot) below which a run looks
/// stable; five times this and it looks transient.
pub const SLOPE_TOL: f64 = 1e-3;

/// Errors reported by the simulation layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid arrival model: {0}")]
    InvalidArrival(&'static str),
    #[error("horizon must be at least one slot")]
    ZeroHorizon,
    #[error("policy, arrivals and catalog disagree on dimensions")]
    DimensionMismatch,
    #[error("queue {queue} receives arrivals but the policy never serves it")]
    UnservedQueue { queue: usize },
    #[error("class ({schedule}, {queue}) does not schedule that queue")]
    InvalidClass { schedule: usize, queue: usize },
    #[error("drift condition fails for class ({schedule}, {queue}): service rate does not exceed arrival rate")]
    DriftConditionViolated { schedule: usize, queue: usize },
    #[error("theta must lie strictly between 0 and 1")]
    ThetaOutOfRange,
    #[error("at least 1000 repetitions required, got {reps}")]
    InsufficientReps { reps: u32 },
}

/// A transmission in flight for one schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OngoingTransmission {
    /// Messages on board per queue; bounded by the schedule's counts.
    pub in_flight: Vec<u64>,
    /// Slots still needed, the current one excluded.
    pub remaining: u64,
}

/// Full state of the chain against a fixed catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemState {
    /// `fresh[schedule][queue]`: assigned but not yet transmitted messages.
    pub fresh: Vec<Vec<u64>>,
    /// At most one transmission in flight per schedule.
    pub ongoing: Vec<Option<OngoingTransmission>>,
}

impl SystemState {
    pub fn empty(catalog: &ScheduleCatalog) -> Self {
        Self {
            fresh: vec![vec![0; catalog.transmitters()]; catalog.len()],
            ongoing: vec![None; catalog.len()],
        }
    }

    /// Messages present anywhere: fresh plus in flight.
    pub fn total_messages(&self) -> u64 {
        let fresh: u64 = self.fresh.iter().flatten().sum();
        let flying: u64 = self
            .ongoing
            .iter()
            .flatten()
            .map(|t| t.in_flight.iter().sum::<u64>())
            .sum();
        fresh + flying
    }

    /// Fresh messages of one class.
    pub fn fresh_count(&self, class: ClassId) -> u64 {
        self.fresh[class.schedule][class.queue]
    }

    /// `(messages in flight, remaining slots)` of one class; zero when its
    /// schedule has nothing in flight.
    pub fn in_flight(&self, class: ClassId) -> (u64, u64) {
        match &self.ongoing[class.schedule] {
            Some(t) if t.in_flight[class.queue] > 0 => {
                (t.in_flight[class.queue], t.remaining)
            }
            _ => (0, 0),
        }
    }
}

/// What happened during one slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotEvents {
    /// Arrived messages per class, first-appearance order.
    pub arrivals: Vec<(ClassId, u64)>,
    /// Catalog index the policy drew.
    pub drawn: usize,
    /// Messages actually transmitted this slot, per queue; all zero when the
    /// slot idles.
    pub implemented: Vec<u64>,
    /// Departed messages per class.
    pub departures: Vec<(ClassId, u64)>,
}

/// Advances the chain by one slot.
pub fn step(
    state: &mut SystemState,
    policy: &PolicySpec,
    arrivals: &ArrivalModel,
    catalog: &ScheduleCatalog,
    streams: &mut RngStreams,
) -> Result<SlotEvents, SimError> {
    let j_count = catalog.transmitters();
    if arrivals.queue_count() != j_count
        || policy.queue_count() != j_count
        || policy.probabilities().len() != catalog.len()
        || state.fresh.len() != catalog.len()
        || state.ongoing.len() != catalog.len()
    {
        return Err(SimError::DimensionMismatch);
    }

    let mut arrival_events: Vec<(ClassId, u64)> = Vec::new();
    for queue in 0..j_count {
        let batch = arrivals.sample(queue, &mut streams.arrivals);
        for _ in 0..batch {
            let mu = policy.mu(queue);
            if mu.iter().all(|&v| v == 0.0) {
                return Err(SimError::UnservedQueue { queue });
            }
            let schedule = sample_index(mu, &mut streams.class_assign);
            state.fresh[schedule][queue] += 1;
            let class = ClassId { schedule, queue };
            match arrival_events.iter_mut().find(|(c, _)| *c == class) {
                Some((_, n)) => *n += 1,
                None => arrival_events.push((class, 1)),
            }
        }
    }

    let drawn = sample_index(policy.probabilities(), &mut streams.schedule_draw);
    let s = catalog.schedule(drawn);
    let mut implemented = vec![0u64; j_count];
    let mut departures: Vec<(ClassId, u64)> = Vec::new();

    if !s.is_idle() {
        if let Some(mut ongoing) = state.ongoing[drawn].take() {
            implemented.copy_from_slice(&ongoing.in_flight);
            ongoing.remaining -= 1;
            if ongoing.remaining == 0 {
                record_departures(&mut departures, drawn, &ongoing.in_flight);
            } else {
                state.ongoing[drawn] = Some(ongoing);
            }
        } else {
            let fresh = &mut state.fresh[drawn];
            if (0..j_count).any(|q| s.count(q) > 0 && fresh[q] > 0) {
                let mut boarding = vec![0u64; j_count];
                for q in 0..j_count {
                    let take = fresh[q].min(s.count(q) as u64);
                    boarding[q] = take;
                    fresh[q] -= take;
                }
                implemented.copy_from_slice(&boarding);
                let n = catalog.length(drawn).expect("serving schedule has a length");
                if n == 1 {
                    record_departures(&mut departures, drawn, &boarding);
                } else {
                    state.ongoing[drawn] =
                        Some(OngoingTransmission { in_flight: boarding, remaining: n - 1 });
                }
            }
        }
    }

    Ok(SlotEvents { arrivals: arrival_events, drawn, implemented, departures })
}

fn record_departures(out: &mut Vec<(ClassId, u64)>, schedule: usize, counts: &[u64]) {
    for (queue, &n) in counts.iter().enumerate() {
        if n > 0 {
            out.push((ClassId { schedule, queue }, n));
        }
    }
}

// ---------------------------------------------------------------------------
// Whole-run harness
// ---------------------------------------------------------------------------

/// Order-sensitive digest of a simulation's event stream; two runs with the
/// same inputs and seed produce the same digest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamDigest(u64);

impl StreamDigest {
    pub fn new() -> Self {
        Self(0xcbf2_9ce4_8422_2325)
    }

    pub fn fold(&mut self, value: u64) {
        self.0 = (self.0 ^ value).wrapping_mul(0x0000_0100_0000_01b3);
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

impl Default for StreamDigest {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityVerdict {
    /// Final-half slope below [`SLOPE_TOL`] and the last-quarter backlog
    /// average within 10% of the last-half average.
    StableLike,
    /// Final-half slope above five times [`SLOPE_TOL`].
    TransientLike,
    Inconclusive,
}

/// Run parameters: length, seed, and how many evenly spaced points the
/// backlog series keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub horizon: u64,
    pub seed: u64,
    pub series_points: u64,
}

impl RunOptions {
    pub fn new(horizon: u64, seed: u64) -> Self {
        Self { horizon, seed, series_points: 10_000 }
    }

    pub fn with_series_points(mut self, points: u64) -> Self {
        self.series_points = points;
        self
    }
}

/// Statistics of one run.
#[derive(Debug, Clone)]
pub struct SimStats {
    pub horizon: u64,
    pub seed: u64,
    /// Cumulative arrivals per `[schedule][queue]` class.
    pub class_arrivals: Vec<Vec<u64>>,
    /// Cumulative departures per `[schedule][queue]` class.
    pub class_departures: Vec<Vec<u64>>,
    /// Slots on which each schedule was drawn.
    pub drawn_slots: Vec<u64>,
    /// Slots on which each schedule actually transmitted something.
    pub served_slots: Vec<u64>,
    /// `(slot, end-of-slot backlog)` at the decimated checkpoints.
    pub backlog_series: Vec<(u64, u64)>,
    /// `(slot, weighted workload c)` at the same checkpoints.
    pub workload_series: Vec<(u64, u64)>,
    pub time_avg_backlog: f64,
    pub last_half_avg_backlog: f64,
    pub last_quarter_avg_backlog: f64,
    /// Least-squares backlog slope over the final half, messages per slot.
    pub final_half_slope: f64,
    pub verdict: StabilityVerdict,
    pub digest: u64,
    /// Conservation or structure violations detected at checkpoints; always
    /// zero unless the simulator itself is broken.
    pub invariant_violations: u64,
}

impl SimStats {
    /// Empirical departure rate of one queue, messages per slot.
    pub fn queue_departure_rate(&self, queue: usize) -> f64 {
        let total: u64 = self.class_departures.iter().map(|row| row[queue]).sum();
        total as f64 / self.horizon as f64
    }

    /// Empirical departure rate of one class, messages per slot.
    pub fn class_departure_rate(&self, class: ClassId) -> f64 {
        self.class_departures[class.schedule][class.queue] as f64 / self.horizon as f64
    }

    /// Empirical arrival rate of one queue, messages per slot.
    pub fn queue_arrival_rate(&self, queue: usize) -> f64 {
        let total: u64 = self.class_arrivals.iter().map(|row| row[queue]).sum();
        total as f64 / self.horizon as f64
    }
}

fn classify(slope: f64, half_avg: f64, quarter_avg: f64) -> StabilityVerdict {
    let settled = if half_avg == 0.0 {
        quarter_avg == 0.0
    } else {
        (quarter_avg / half_avg - 1.0).abs() <= 0.1
    };
    if slope < SLOPE_TOL && settled {
        StabilityVerdict::StableLike
    } else if slope > 5.0 * SLOPE_TOL {
        StabilityVerdict::TransientLike
    } else {
        StabilityVerdict::Inconclusive
    }
}

/// Counts violated structural invariants: class-level conservation, at most
/// one transmission per schedule with a sane countdown and composition, no
/// stray mass on the idle schedule, and agreement of the tracked backlog
/// with a recount.
fn audit(
    state: &SystemState,
    catalog: &ScheduleCatalog,
    cum_arrivals: &[Vec<u64>],
    cum_departures: &[Vec<u64>],
    tracked_backlog: u64,
) -> u64 {
    let mut violations = 0u64;
    for idx in 0..catalog.len() {
        let s = catalog.schedule(idx);
        let ongoing = state.ongoing[idx].as_ref();
        if let Some(t) = ongoing {
            let n = catalog.length(idx);
            let ok = n.is_some_and(|n| t.remaining >= 1 && t.remaining <= n)
                && t.in_flight.iter().sum::<u64>() >= 1
                && (0..catalog.transmitters())
                    .all(|q| t.in_flight[q] <= s.count(q) as u64);
            if !ok {
                violations += 1;
            }
        }
        for q in 0..catalog.transmitters() {
            let flying = ongoing.map_or(0, |t| t.in_flight[q]);
            let held = state.fresh[idx][q] + flying;
            if cum_arrivals[idx][q] != cum_departures[idx][q] + held {
                violations += 1;
            }
            if s.count(q) == 0 && (state.fresh[idx][q] != 0 || flying != 0) {
                violations += 1;
            }
        }
    }
    if state.total_messages() != tracked_backlog {
        violations += 1;
    }
    violations
}

/// Runs the chain from the empty state for `opts.horizon` slots.
pub fn run(
    policy: &PolicySpec,
    arrivals: &ArrivalModel,
    catalog: &ScheduleCatalog,
    opts: &RunOptions,
) -> Result<SimStats, SimError> {
    if opts.horizon == 0 {
        return Err(SimError::ZeroHorizon);
    }
    let j_count = catalog.transmitters();
    if arrivals.queue_count() != j_count || policy.queue_count() != j_count {
        return Err(SimError::DimensionMismatch);
    }
    for queue in 0..j_count {
        if arrivals.mean(queue) > 0.0 && policy.mu(queue).iter().all(|&v| v == 0.0) {
            return Err(SimError::UnservedQueue { queue });
        }
    }

    let h = opts.horizon;
    let stride = (h / opts.series_points.max(1)).max(1);
    let half_start = h - h / 2;
    let half_len = h - half_start;
    let quarter_start = h - h / 4;
    // Consecutive integer abscissas make the centred slope denominator exact.
    let t_mid = (half_start + (h - 1)) as f64 / 2.0;

    let mut state = SystemState::empty(catalog);
    let mut streams = RngStreams::from_seed(opts.seed);
    let mut digest = StreamDigest::new();
    let mut cum_arrivals = vec![vec![0u64; j_count]; catalog.len()];
    let mut cum_departures = vec![vec![0u64; j_count]; catalog.len()];
    let mut drawn_slots = vec![0u64; catalog.len()];
    let mut served_slots = vec![0u64; catalog.len()];
    let mut backlog: u64 = 0;
    let mut backlog_sum: u128 = 0;
    let mut half_sum: u128 = 0;
    let mut quarter_sum: u128 = 0;
    let mut slope_cross: f64 = 0.0;
    let mut backlog_series = Vec::new();
    let mut workload_series = Vec::new();
    let mut violations = 0u64;

    for slot in 0..h {
        let ev = step(&mut state, policy, arrivals, catalog, &mut streams)?;

        digest.fold(ev.drawn as u64);
        for &v in &ev.implemented {
            digest.fold(v);
        }
        digest.fold(ev.arrivals.len() as u64);
        for &(class, n) in &ev.arrivals {
            digest.fold(class.schedule as u64);
            digest.fold(class.queue as u64);
            digest.fold(n);
            cum_arrivals[class.schedule][class.queue] += n;
            backlog += n;
        }
        digest.fold(ev.departures.len() as u64);
        for &(class, n) in &ev.departures {
            digest.fold(class.schedule as u64);
            digest.fold(class.queue as u64);
            digest.fold(n);
            cum_departures[class.schedule][class.queue] += n;
            backlog -= n;
        }

        drawn_slots[ev.drawn] += 1;
        if ev.implemented.iter().any(|&v| v > 0) {
            served_slots[ev.drawn] += 1;
        }
        let s = catalog.schedule(ev.drawn);
        if (0..j_count).any(|q| ev.implemented[q] > s.count(q) as u64) {
            violations += 1;
        }

        backlog_sum += backlog as u128;
        if slot >= half_start {
            half_sum += backlog as u128;
            slope_cross += (slot as f64 - t_mid) * backlog as f64;
        }
        if slot >= quarter_start {
            quarter_sum += backlog as u128;
        }

        if (slot + 1) % stride == 0 || slot + 1 == h {
            backlog_series.push((slot, backlog));
            workload_series.push((slot, crate::lyapunov::weighted_backlog(&state, catalog)));
            violations += audit(&state, catalog, &cum_arrivals, &cum_departures, backlog);
        }
    }

    let slope = if half_len >= 2 {
        let n = half_len as f64;
        slope_cross / (n * (n * n - 1.0) / 12.0)
    } else {
        0.0
    };
    let half_avg = half_sum as f64 / half_len as f64;
    let quarter_len = h - quarter_start;
    let quarter_avg = if quarter_len > 0 {
        quarter_sum as f64 / quarter_len as f64
    } else {
        half_avg
    };

    Ok(SimStats {
        horizon: h,
        seed: opts.seed,
        class_arrivals: cum_arrivals,
        class_departures: cum_departures,
        drawn_slots,
        served_slots,
        backlog_series,
        workload_series,
        time_avg_backlog: backlog_sum as f64 / h as f64,
        last_half_avg_backlog: half_avg,
        last_quarter_avg_backlog: quarter_avg,
        final_half_slope: slope,
        verdict: classify(slope, half_avg, quarter_avg),
        digest: digest.finish(),
        invariant_violations: violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrivals::BatchDistribution;
    use crate::catalog::enumerate_schedules;
    use crate::coding::{ChannelParams, CodingConfig};
    use crate::policy::split_distribution;
    use alloc::vec;

    /// Single queue, K = 1: schedules (0) and (1) with N((1)) = 6.
    fn single_catalog() -> ScheduleCatalog {
        let cfg =
            CodingConfig::new(&[2], ChannelParams::new(vec![3.0], 1.0).unwrap(), 1.0, 0.01).unwrap();
        enumerate_schedules(&cfg, 1).unwrap()
    }

    fn always_serve(catalog: &ScheduleCatalog) -> PolicySpec {
        let mut p = vec![0.0; catalog.len()];
        p[1] = 1.0;
        split_distribution(&p, catalog).unwrap()
    }

    #[test]
    fn deterministic_single_message_life_cycle() {
        let cat = single_catalog();
        let policy = always_serve(&cat);
        // One message at slot 0, nothing afterwards.
        let arrivals = ArrivalModel::new(vec![BatchDistribution::FinitePmf {
            probs: vec![0.0, 1.0],
        }])
        .unwrap();
        let silent = ArrivalModel::silent(1);
        let mut state = SystemState::empty(&cat);
        let mut streams = RngStreams::from_seed(5);

        let ev = step(&mut state, &policy, &arrivals, &cat, &mut streams).unwrap();
        assert_eq!(ev.arrivals, vec![(ClassId { schedule: 1, queue: 0 }, 1)]);
        assert_eq!(ev.drawn, 1);
        assert_eq!(ev.implemented, vec![1]);
        assert!(ev.departures.is_empty());
        let (flying, remaining) = state.in_flight(ClassId { schedule: 1, queue: 0 });
        assert_eq!((flying, remaining), (1, 5));

        // Five more served slots finish the transmission.
        for wait in (1..5).rev() {
            let ev = step(&mut state, &policy, &silent, &cat, &mut streams).unwrap();
            assert_eq!(ev.implemented, vec![1]);
            assert!(ev.departures.is_empty());
            let (_, remaining) = state.in_flight(ClassId { schedule: 1, queue: 0 });
            assert_eq!(remaining, wait as u64);
        }
        let ev = step(&mut state, &policy, &silent, &cat, &mut streams).unwrap();
        assert_eq!(ev.departures, vec![(ClassId { schedule: 1, queue: 0 }, 1)]);
        assert_eq!(state.total_messages(), 0);
        assert!(state.ongoing[1].is_none());
    }

    #[test]
    fn idle_draw_serves_nothing() {
        let cat = single_catalog();
        let mut p = vec![0.0; cat.len()];
        p[1] = 0.5;
        let policy = split_distribution(&p, &cat).unwrap();
        let silent = ArrivalModel::silent(1);
        let mut state = SystemState::empty(&cat);
        let mut streams = RngStreams::from_seed(9);
        for _ in 0..50 {
            let ev = step(&mut state, &policy, &silent, &cat, &mut streams).unwrap();
            assert_eq!(ev.implemented, vec![0]);
            assert!(ev.departures.is_empty());
        }
        assert_eq!(state.total_messages(), 0);
    }

    #[test]
    fn unserved_arrivals_error() {
        let cat = single_catalog();
        let idle = crate::policy::PolicySpec::from_probabilities(&[1.0, 0.0], &cat).unwrap();
        let arrivals =
            ArrivalModel::new(vec![BatchDistribution::Deterministic { batch: 1 }]).unwrap();
        let mut state = SystemState::empty(&cat);
        let mut streams = RngStreams::from_seed(5);
        assert_eq!(
            step(&mut state, &idle, &arrivals, &cat, &mut streams),
            Err(SimError::UnservedQueue { queue: 0 })
        );
        let r = run(&idle, &arrivals, &cat, &RunOptions::new(10, 1));
        assert_eq!(r.unwrap_err(), SimError::UnservedQueue { queue: 0 });
    }

    #[test]
    fn run_is_reproducible_and_conserves() {
        let cat = single_catalog();
        let policy = always_serve(&cat);
        let arrivals =
            ArrivalModel::new(vec![BatchDistribution::Bernoulli { q: 0.15 }]).unwrap();
        let opts = RunOptions::new(20_000, 123).with_series_points(100);
        let a = run(&policy, &arrivals, &cat, &opts).unwrap();
        let b = run(&policy, &arrivals, &cat, &opts).unwrap();
        assert_eq!(a.digest, b.digest);
        assert_eq!(a.backlog_series, b.backlog_series);
        assert_eq!(a.invariant_violations, 0);
        assert!(a.backlog_series.len() >= 100);

        let c = run(&policy, &arrivals, &cat, &RunOptions::new(20_000, 124)).unwrap();
        assert_ne!(a.digest, c.digest);
    }

    #[test]
    fn saturated_run_matches_service_rate() {
        let cat = single_catalog();
        let policy = always_serve(&cat);
        // Two messages per slot guarantees the server never starves.
        let arrivals =
            ArrivalModel::new(vec![BatchDistribution::Deterministic { batch: 2 }]).unwrap();
        let stats = run(&policy, &arrivals, &cat, &RunOptions::new(60_000, 7)).unwrap();
        assert_eq!(stats.invariant_violations, 0);
        assert_eq!(stats.verdict, StabilityVerdict::TransientLike);
        // Departure rate equals the service rate 1/6 up to edge effects.
        assert!((stats.queue_departure_rate(0) - 1.0 / 6.0).abs() < 1e-3);
        assert!((stats.final_half_slope - (2.0 - 1.0 / 6.0)).abs() < 0.01);
    }

    #[test]
    fn zero_horizon_is_rejected() {
        let cat = single_catalog();
        let policy = always_serve(&cat);
        let arrivals = ArrivalModel::silent(1);
        assert_eq!(
            run(&policy, &arrivals, &cat, &RunOptions::new(0, 1)).unwrap_err(),
            SimError::ZeroHorizon
        );
    }

    #[test]
    fn digest_depends_on_events() {
        let mut a = StreamDigest::new();
        let mut b = StreamDigest::new();
        a.fold(1);
        a.fold(2);
        b.fold(2);
        b.fold(1);
        assert_ne!(a.finish(), b.finish());
    }

    #[test]
    fn empty_run_classifies_stable() {
        let cat = single_catalog();
        let policy = always_serve(&cat);
        let stats =
            run(&policy, &ArrivalModel::silent(1), &cat, &RunOptions::new(1000, 3)).unwrap();
        assert_eq!(stats.verdict, StabilityVerdict::StableLike);
        assert_eq!(stats.time_avg_backlog, 0.0);
        assert_eq!(stats.final_half_slope, 0.0);
    }
}
