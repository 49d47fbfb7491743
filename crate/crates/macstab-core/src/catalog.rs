//! Enumeration of bounded schedules and their per-schedule service figures.
//!
//! A catalog fixes a coding configuration and a budget `K`, lists every
//! schedule with at most `K` messages in total (the idle schedule included,
//! always at index 0), and precomputes for each serving schedule its
//! codeword length `N(s)` and service rate vector `v_j(s) = s_j / N(s)` in
//! messages per slot. All region and simulation queries work against these
//! indices.

use alloc::vec::Vec;

use crate::coding::{codeword_length, CodingConfig, Schedule};
use crate::region::RegionError;

/// Largest number of schedules a catalog may hold.
pub const CATALOG_LIMIT: u64 = 100_000;

/// One message class: messages of queue `queue` that will be (or are being)
/// served as part of the schedule at `schedule`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassId {
    pub schedule: usize,
    pub queue: usize,
}

/// All schedules with total message count at most `K`, with their service
/// requirements and rates.
#[derive(Debug, Clone)]
pub struct ScheduleCatalog {
    config: CodingConfig,
    max_total: u32,
    schedules: Vec<Schedule>,
    /// Codeword length per schedule; 0 marks the idle schedule.
    lengths: Vec<u64>,
    rates: Vec<Vec<f64>>,
}

/// `(n choose k)` without overflow for the sizes the guard cares about.
fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > (CATALOG_LIMIT as u128) * (CATALOG_LIMIT as u128) {
            return acc;
        }
    }
    acc
}

/// Builds the catalog of every schedule with `sum_j s_j <= k`.
///
/// The number of such schedules is `binomial(J + K, J)`; anything above
/// [`CATALOG_LIMIT`] is refused up front. Schedules appear in
/// lexicographic order of their count vectors, so the idle schedule is
/// always index 0.
pub fn enumerate_schedules(config: &CodingConfig, k: u32) -> Result<ScheduleCatalog, RegionError> {
    if k == 0 {
        return Err(RegionError::InvalidInput("schedule budget K must be at least 1"));
    }
    let j = config.transmitters();
    let size = binomial(j as u64 + k as u64, j as u64);
    if size > CATALOG_LIMIT as u128 {
        return Err(RegionError::CatalogTooLarge { size, limit: CATALOG_LIMIT });
    }

    let mut schedules = Vec::with_capacity(size as usize);
    let mut counts = alloc::vec![0u32; j];
    push_schedules(&mut schedules, &mut counts, 0, k);
    debug_assert_eq!(schedules.len() as u128, size);

    let mut lengths = Vec::with_capacity(schedules.len());
    let mut rates = Vec::with_capacity(schedules.len());
    for s in &schedules {
        if s.is_idle() {
            lengths.push(0);
            rates.push(alloc::vec![0.0; j]);
        } else {
            let n = codeword_length(config, s)?;
            lengths.push(n);
            rates.push(s.counts().iter().map(|&c| c as f64 / n as f64).collect());
        }
    }
    Ok(ScheduleCatalog { config: config.clone(), max_total: k, schedules, lengths, rates })
}

fn push_schedules(out: &mut Vec<Schedule>, counts: &mut Vec<u32>, pos: usize, budget: u32) {
    if pos == counts.len() {
        out.push(Schedule::new(counts.clone()));
        return;
    }
    for c in 0..=budget {
        counts[pos] = c;
        push_schedules(out, counts, pos + 1, budget - c);
    }
    counts[pos] = 0;
}

impl ScheduleCatalog {
    pub fn config(&self) -> &CodingConfig {
        &self.config
    }

    /// Number of schedules, idle included.
    pub fn len(&self) -> usize {
        self.schedules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schedules.is_empty()
    }

    pub fn transmitters(&self) -> usize {
        self.config.transmitters()
    }

    /// The budget `K` the catalog was built with.
    pub fn max_total(&self) -> u32 {
        self.max_total
    }

    pub fn schedules(&self) -> &[Schedule] {
        &self.schedules
    }

    pub fn schedule(&self, idx: usize) -> &Schedule {
        &self.schedules[idx]
    }

    pub fn idle_index(&self) -> usize {
        0
    }

    /// Codeword length of the schedule at `idx`; `None` for the idle one.
    pub fn length(&self, idx: usize) -> Option<u64> {
        match self.lengths[idx] {
            0 => None,
            n => Some(n),
        }
    }

    /// `v_j(s) = s_j / N(s)` in messages per slot; all zero for idle.
    pub fn service_rates(&self, idx: usize) -> &[f64] {
        &self.rates[idx]
    }

    /// Index of an exact schedule, if present.
    pub fn find(&self, s: &Schedule) -> Option<usize> {
        self.schedules.binary_search(s).ok()
    }

    /// Indices of all non-idle schedules.
    pub fn serving_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| !self.schedules[i].is_idle())
    }

    /// Every `(schedule, queue)` pair with a positive scheduled count, in
    /// (schedule, queue) order.
    pub fn classes(&self) -> Vec<ClassId> {
        let mut out = Vec::new();
        for (idx, s) in self.schedules.iter().enumerate() {
            for q in 0..s.transmitters() {
                if s.count(q) > 0 {
                    out.push(ClassId { schedule: idx, queue: q });
                }
            }
        }
        out
    }
}
