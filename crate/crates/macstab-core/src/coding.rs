//! Random-coding reliability bound for joint maximum-likelihood decoding and
//! the codeword lengths it implies.
//!
//! A schedule `s = (s_1, ..., s_J)` carries `s_j` messages from transmitter
//! `j` inside one jointly decoded codeword, each message drawn from an
//! alphabet of size `M_j`, over a Gaussian channel with received powers `P_j`
//! and noise variance `sigma2`. For a real tilting parameter `rho` in `[0, 1]`
//! the expected joint-decoding error probability after `N` channel uses is
//! bounded by
//!
//! ```text
//! chi(s, N) = sum over non-empty S within active(s) of
//!             exp(rho * sum_{j in S} s_j ln M_j  -  N * E_S)
//! E_S       = rho * ln(1 + sum_{j in S} P_j / ((1 + rho) * sigma2))
//! ```
//!
//! where `active(s) = { j : s_j > 0 }`. The service requirement `N(s)` of the
//! schedule is the smallest `N >= 1` with `chi(s, N) <= pe`; it exists for
//! every `rho > 0` and is what the queueing layers treat as the holding time
//! of one joint transmission.
//!
//! Alphabet sizes are stored on a log scale, so "alphabets" far beyond the
//! range of any integer type (`ln M` up to about `7e2` per message, or much
//! larger for asymptotic probing) are handled exactly as well as small ones.

use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Hard ceiling for codeword-length searches. Anything above this is outside
/// the regime the rest of the toolkit is meant for.
pub const LENGTH_CAP: u64 = 100_000_000;

/// Grid used when scanning the tilting parameter for the shortest codeword.
pub const DEFAULT_RHO_GRID: [f64; 4] = [0.001, 0.01, 0.1, 1.0];

/// Errors reported by the coding layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodingError {
    /// A constructor argument failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    /// A schedule's transmitter count disagrees with the configuration.
    #[error("schedule has {schedule} transmitters but the configuration has {config}")]
    DimensionMismatch { schedule: usize, config: usize },
    /// The operation needs at least one scheduled message.
    #[error("schedule is idle: no transmitter has a message scheduled")]
    IdleSchedule,
    /// A transmitter subset mask was empty or referenced unknown transmitters.
    #[error("transmitter subset is empty or out of range")]
    BadSubset,
    /// With `rho = 0` the bound is a constant that never meets the target.
    #[error("error bound is constant at {bound} and never reaches the target")]
    UnreachableReliability { bound: f64 },
    /// The search passed [`LENGTH_CAP`] without meeting the target.
    #[error("no codeword length up to {cap} meets the error target")]
    LengthCapExceeded { cap: u64 },
}

// ---------------------------------------------------------------------------
// Channel and configuration
// ---------------------------------------------------------------------------

/// Received powers and noise level of the shared Gaussian channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    powers: Vec<f64>,
    sigma2: f64,
}

impl ChannelParams {
    /// Validates that every power and the noise variance are positive and
    /// finite. At most 32 transmitters are supported (subset enumeration
    /// uses a `u32` bit mask).
    pub fn new(powers: Vec<f64>, sigma2: f64) -> Result<Self, CodingError> {
        if powers.is_empty() {
            return Err(CodingError::InvalidConfig("at least one transmitter required"));
        }
        if powers.len() > 32 {
            return Err(CodingError::InvalidConfig("at most 32 transmitters supported"));
        }
        if powers.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(CodingError::InvalidConfig("received powers must be positive and finite"));
        }
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(CodingError::InvalidConfig("noise variance must be positive and finite"));
        }
        Ok(Self { powers, sigma2 })
    }

    pub fn transmitters(&self) -> usize {
        self.powers.len()
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Bit mask selecting every transmitter.
    pub fn full_mask(&self) -> u32 {
        mask_for(self.powers.len())
    }

    /// Sum of received powers over the transmitters in `subset`.
    pub fn subset_power(&self, subset: u32) -> f64 {
        let mut sum = 0.0;
        for (j, p) in self.powers.iter().enumerate() {
            if subset & (1 << j) != 0 {
                sum += p;
            }
        }
        sum
    }

    /// `ln(1 + sum_{j in S} P_j / sigma2)`: the largest total rate, in nats
    /// per channel use, that the transmitters in `S` can jointly sustain.
    pub fn subset_capacity(&self, subset: u32) -> Result<f64, CodingError> {
        self.check_subset(subset)?;
        Ok(math::ln_1p(self.subset_power(subset) / self.sigma2))
    }

    fn check_subset(&self, subset: u32) -> Result<(), CodingError> {
        if subset == 0 || subset & !self.full_mask() != 0 {
            return Err(CodingError::BadSubset);
        }
        Ok(())
    }
}

fn mask_for(transmitters: usize) -> u32 {
    if transmitters >= 32 {
        u32::MAX
    } else {
        (1u32 << transmitters) - 1
    }
}

/// Everything the error bound depends on: channel, per-message alphabet
/// sizes (log scale), the tilting parameter and the reliability target.
#[derive(Debug, Clone, PartialEq)]
pub struct CodingConfig {
    channel: ChannelParams,
    ln_alphabet: Vec<f64>,
    rho: f64,
    pe: f64,
}

impl CodingConfig {
    /// Builds a configuration from integer alphabet sizes (each at least 2).
    pub fn new(
        alphabet_sizes: &[u64],
        channel: ChannelParams,
        rho: f64,
        pe: f64,
    ) -> Result<Self, CodingError> {
        if alphabet_sizes.iter().any(|&m| m < 2) {
            return Err(CodingError::InvalidConfig("alphabet sizes must be at least 2"));
        }
        let ln_alphabet = alphabet_sizes.iter().map(|&m| math::ln(m as f64)).collect();
        Self::from_ln_alphabets(ln_alphabet, channel, rho, pe)
    }

    /// Builds a configuration directly from `ln M_j` values, which is the
    /// natural parameterisation when probing very large alphabets.
    pub fn from_ln_alphabets(
        ln_alphabet: Vec<f64>,
        channel: ChannelParams,
        rho: f64,
        pe: f64,
    ) -> Result<Self, CodingError> {
        if ln_alphabet.len() != channel.transmitters() {
            return Err(CodingError::InvalidConfig(
                "alphabet list and channel must have the same number of transmitters",
            ));
        }
        if ln_alphabet.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(CodingError::InvalidConfig("ln-alphabet sizes must be positive and finite"));
        }
        if !(rho.is_finite() && (0.0..=1.0).contains(&rho)) {
            return Err(CodingError::InvalidConfig("rho must lie in [0, 1]"));
        }
        if !(pe.is_finite() && pe > 0.0 && pe < 1.0) {
            return Err(CodingError::InvalidConfig("target error probability must lie in (0, 1)"));
        }
        Ok(Self { channel, ln_alphabet, rho, pe })
    }

    pub fn channel(&self) -> &ChannelParams {
        &self.channel
    }

    pub fn transmitters(&self) -> usize {
        self.channel.transmitters()
    }

    pub fn ln_alphabet(&self) -> &[f64] {
        &self.ln_alphabet
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn pe(&self) -> f64 {
        self.pe
    }

    /// Same configuration with a different tilting parameter.
    pub fn with_rho(&self, rho: f64) -> Result<Self, CodingError> {
        Self::from_ln_alphabets(self.ln_alphabet.clone(), self.channel.clone(), rho, self.pe)
    }
}

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

/// Message counts per transmitter for one jointly decoded codeword.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Schedule {
    counts: Vec<u32>,
}

impl Schedule {
    pub fn new(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn transmitters(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, j: usize) -> u32 {
        self.counts[j]
    }

    /// Total number of messages in the codeword.
    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn is_idle(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// Bit mask of transmitters with at least one scheduled message.
    pub fn active_mask(&self) -> u32 {
        let mut mask = 0u32;
        for (j, &c) in self.counts.iter().enumerate() {
            if c > 0 && j < 32 {
                mask |= 1 << j;
            }
        }
        mask
    }

    /// Component-wise `self >= other`.
    pub fn dominates(&self, other: &Schedule) -> bool {
        self.counts.len() == other.counts.len()
            && self.counts.iter().zip(&other.counts).all(|(a, b)| a >= b)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Error exponents and the bound
// ---------------------------------------------------------------------------

/// `E_S = rho * ln(1 + sum_{j in S} P_j / ((1 + rho) * sigma2))` for a
/// non-empty transmitter subset given as a bit mask.
pub fn error_exponent(config: &CodingConfig, subset: u32) -> Result<f64, CodingError> {
    config.channel.check_subset(subset)?;
    let load = config.channel.subset_power(subset) / ((1.0 + config.rho) * config.channel.sigma2);
    Ok(config.rho * math::ln_1p(load))
}

/// Error exponents of every non-empty subset of a schedule's active
/// transmitters, keyed by subset mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentTable {
    entries: Vec<(u32, f64)>,
}

impl ExponentTable {
    pub fn for_schedule(config: &CodingConfig, s: &Schedule) -> Result<Self, CodingError> {
        let terms = BoundTerms::build(config, s)?;
        let mut entries: Vec<(u32, f64)> =
            terms.terms.iter().map(|t| (t.subset, t.exponent)).collect();
        entries.sort_by_key(|&(mask, _)| mask);
        Ok(Self { entries })
    }

    /// `(subset mask, exponent)` pairs in increasing mask order.
    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn exponent(&self, subset: u32) -> Option<f64> {
        self.entries
            .binary_search_by_key(&subset, |&(mask, _)| mask)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

struct BoundTerm {
    subset: u32,
    /// `rho * sum_{j in S} s_j ln M_j`
    alphabet_mass: f64,
    exponent: f64,
}

/// The bound as a list of `exp(alphabet_mass - N * exponent)` terms.
struct BoundTerms {
    terms: Vec<BoundTerm>,
}

impl BoundTerms {
    fn build(config: &CodingConfig, s: &Schedule) -> Result<Self, CodingError> {
        if s.transmitters() != config.transmitters() {
            return Err(CodingError::DimensionMismatch {
                schedule: s.transmitters(),
                config: config.transmitters(),
            });
        }
        let mask = s.active_mask();
        if mask == 0 {
            return Err(CodingError::IdleSchedule);
        }
        let mut terms = Vec::new();
        let mut sub = mask;
        while sub != 0 {
            let mut mass = 0.0;
            for (j, &c) in s.counts().iter().enumerate() {
                if sub & (1 << j) != 0 {
                    mass += c as f64 * config.ln_alphabet[j];
                }
            }
            terms.push(BoundTerm {
                subset: sub,
                alphabet_mass: config.rho * mass,
                exponent: error_exponent(config, sub)?,
            });
            sub = (sub - 1) & mask;
        }
        Ok(Self { terms })
    }

    fn eval(&self, n: u64) -> f64 {
        self.terms
            .iter()
            .map(|t| math::exp(t.alphabet_mass - n as f64 * t.exponent))
            .sum()
    }

    fn subset_count(&self) -> usize {
        self.terms.len()
    }
}

/// Upper bound `chi(s, N)` on the probability of joint-decoding error after
/// `N` channel uses. Weakly decreasing in `N`; strictly so when `rho > 0`.
pub fn joint_error_bound(config: &CodingConfig, s: &Schedule, n: u64) -> Result<f64, CodingError> {
    Ok(BoundTerms::build(config, s)?.eval(n))
}

/// Smallest `N >= 1` with `chi(s, N) <= pe`.
///
/// The predicate is monotone in `N`, so the search gallops to an upper
/// bracket and bisects; the result is identical to a linear scan from 1.
/// Overflow of individual terms to `inf` (huge alphabets at small `N`) is
/// harmless for the same reason.
pub fn codeword_length(config: &CodingConfig, s: &Schedule) -> Result<u64, CodingError> {
    let terms = BoundTerms::build(config, s)?;
    if config.rho == 0.0 {
        // Every term degenerates to exp(0) = 1: the bound equals the number
        // of subsets forever and can never drop below pe < 1.
        return Err(CodingError::UnreachableReliability { bound: terms.eval(1) });
    }
    let pe = config.pe;
    if terms.eval(1) <= pe {
        return Ok(1);
    }
    let mut lo = 1u64; // chi(lo) > pe
    let mut hi = 2u64;
    while terms.eval(hi) > pe {
        if hi >= LENGTH_CAP {
            return Err(CodingError::LengthCapExceeded { cap: LENGTH_CAP });
        }
        lo = hi;
        hi = hi.saturating_mul(2).min(LENGTH_CAP);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if terms.eval(mid) <= pe {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `min(n >= 1 : x <= n * q)` for positive `x` and `q`: the number of
/// whole quanta of size `q` needed to cover `x`.
fn quantized_count(x: f64, q: f64) -> u64 {
    let n = math::ceil(x / q);
    if n < 1.0 {
        1
    } else {
        n as u64
    }
}

/// Closed-form bracket `(lower, upper)` around the exact service requirement:
/// `lower <= codeword_length(...) <= upper`.
///
/// Both ends come from covering each term of the bound separately. The lower
/// end requires the single largest term to fit inside `pe`; the upper end
/// requires each of the `k` terms to fit inside `pe / 2^(k-1)`, which is
/// sufficient because `k <= 2^(k-1)`.
pub fn codeword_length_bounds(
    config: &CodingConfig,
    s: &Schedule,
) -> Result<(u64, u64), CodingError> {
    let terms = BoundTerms::build(config, s)?;
    if config.rho == 0.0 {
        return Err(CodingError::UnreachableReliability { bound: terms.eval(1) });
    }
    let neg_ln_pe = -math::ln(config.pe);
    let slack = (terms.subset_count() as f64 - 1.0) * core::f64::consts::LN_2;
    let mut lower = 1u64;
    let mut upper = 1u64;
    for t in &terms.terms {
        lower = lower.max(quantized_count(neg_ln_pe + t.alphabet_mass, t.exponent));
        upper = upper.max(quantized_count(neg_ln_pe + slack + t.alphabet_mass, t.exponent));
    }
    Ok((lower, upper))
}

// ---------------------------------------------------------------------------
// Asymptotic per-message rates
// ---------------------------------------------------------------------------

fn rates_from_normalized_exponent<F>(s: &Schedule, transmitters: usize, f: F) -> Result<Vec<f64>, CodingError>
where
    F: Fn(u32) -> f64,
{
    if s.transmitters() != transmitters {
        return Err(CodingError::DimensionMismatch {
            schedule: s.transmitters(),
            config: transmitters,
        });
    }
    let mask = s.active_mask();
    if mask == 0 {
        return Err(CodingError::IdleSchedule);
    }
    let mut g = f64::INFINITY;
    let mut sub = mask;
    while sub != 0 {
        let mut load = 0u64;
        for (j, &c) in s.counts().iter().enumerate() {
            if sub & (1 << j) != 0 {
                load += c as u64;
            }
        }
        g = g.min(f(sub) / load as f64);
        sub = (sub - 1) & mask;
    }
    Ok(s.counts().iter().map(|&c| c as f64 * g).collect())
}

/// Per-transmitter rates, in nats per channel use, that a schedule sustains
/// as the alphabets grow with the codeword at a fixed tilting parameter:
/// `R_j = s_j * min_S E_S / (rho * sum_{k in S} s_k)` over non-empty subsets
/// `S` of the active transmitters.
///
/// The ratio `E_S / rho` is evaluated in closed form, so `rho = 0` is valid
/// and coincides with [`asymptotic_rates_limit`].
pub fn asymptotic_rates_fixed_rho(
    channel: &ChannelParams,
    rho: f64,
    s: &Schedule,
) -> Result<Vec<f64>, CodingError> {
    if !(rho.is_finite() && (0.0..=1.0).contains(&rho)) {
        return Err(CodingError::InvalidConfig("rho must lie in [0, 1]"));
    }
    rates_from_normalized_exponent(s, channel.transmitters(), |sub| {
        math::ln_1p(channel.subset_power(sub) / ((1.0 + rho) * channel.sigma2))
    })
}

/// The `rho -> 0` limit of [`asymptotic_rates_fixed_rho`]:
/// `R_j = s_j * min_S ln(1 + sum_{k in S} P_k / sigma2) / sum_{k in S} s_k`.
pub fn asymptotic_rates_limit(channel: &ChannelParams, s: &Schedule) -> Result<Vec<f64>, CodingError> {
    rates_from_normalized_exponent(s, channel.transmitters(), |sub| {
        math::ln_1p(channel.subset_power(sub) / channel.sigma2)
    })
}

/// Scans a grid of tilting parameters and returns the `(rho, N)` pair with
/// the shortest codeword. Grid entries for which no finite length exists
/// (for example `rho = 0`) are skipped; if every entry fails, the last
/// failure is returned.
pub fn best_rho_on_grid(
    config: &CodingConfig,
    s: &Schedule,
    grid: &[f64],
) -> Result<(f64, u64), CodingError> {
    let mut best: Option<(f64, u64)> = None;
    let mut last_err = CodingError::InvalidConfig("empty rho grid");
    for &rho in grid {
        match config.with_rho(rho).and_then(|c| codeword_length(&c, s)) {
            Ok(n) => {
                if best.map_or(true, |(_, bn)| n < bn) {
                    best = Some((rho, n));
                }
            }
            Err(e) => last_err = e,
        }
    }
    best.ok_or(last_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Single transmitter, M = 2, P = 3 sigma2, rho = 1, pe = 0.01.
    fn canonical() -> CodingConfig {
        CodingConfig::new(&[2], ChannelParams::new(vec![3.0], 1.0).unwrap(), 1.0, 0.01).unwrap()
    }

    /// Two transmitters, both M = 2 and P = 3 sigma2, rho = 1, pe = 0.01.
    fn canonical_pair() -> CodingConfig {
        CodingConfig::new(&[2, 2], ChannelParams::new(vec![3.0, 3.0], 1.0).unwrap(), 1.0, 0.01)
            .unwrap()
    }

    #[test]
    fn exponent_matches_closed_form() {
        let c = canonical();
        // rho = 1, P/sigma2 = 3: E = ln(1 + 3/2) = ln 2.5.
        let e = error_exponent(&c, 0b1).unwrap();
        assert!((e - 2.5f64.ln()).abs() < 1e-15);

        let zero = c.with_rho(0.0).unwrap();
        assert_eq!(error_exponent(&zero, 0b1).unwrap(), 0.0);
    }

    #[test]
    fn exponent_rejects_bad_subsets() {
        let c = canonical();
        assert_eq!(error_exponent(&c, 0), Err(CodingError::BadSubset));
        assert_eq!(error_exponent(&c, 0b10), Err(CodingError::BadSubset));
    }

    #[test]
    fn exponent_grows_with_subset() {
        let c = canonical_pair();
        let e1 = error_exponent(&c, 0b01).unwrap();
        let e12 = error_exponent(&c, 0b11).unwrap();
        assert!(e12 > e1);
    }

    #[test]
    fn bound_at_rho_zero_counts_subsets() {
        let c = canonical_pair().with_rho(0.0).unwrap();
        let s = Schedule::new(vec![1, 1]);
        for n in [0, 1, 10, 1000] {
            assert_eq!(joint_error_bound(&c, &s, n).unwrap(), 3.0);
        }
    }

    #[test]
    fn bound_matches_single_user_values() {
        let c = canonical();
        let s = Schedule::new(vec![1]);
        // chi(N) = 2 * 2.5^-N.
        assert!((joint_error_bound(&c, &s, 0).unwrap() - 2.0).abs() < 1e-15);
        assert!((joint_error_bound(&c, &s, 5).unwrap() - 0.02048).abs() < 1e-15);
        assert!((joint_error_bound(&c, &s, 6).unwrap() - 0.008192).abs() < 1e-15);
    }

    #[test]
    fn bound_matches_two_user_values() {
        let c = canonical_pair();
        let s = Schedule::new(vec![1, 1]);
        // chi(N) = 2 * 2 * 2.5^-N + 4 * 4^-N.
        let chi6 = 4.0 * 2.5f64.powi(-6) + 4.0 * 4.0f64.powi(-6);
        let got = joint_error_bound(&c, &s, 6).unwrap();
        assert!((got - chi6).abs() < 1e-15, "{got} vs {chi6}");
    }

    #[test]
    fn length_matches_hand_computed_cases() {
        let c = canonical();
        assert_eq!(codeword_length(&c, &Schedule::new(vec![1])).unwrap(), 6);
        assert_eq!(codeword_length(&c, &Schedule::new(vec![2])).unwrap(), 7);
        assert_eq!(codeword_length(&canonical_pair(), &Schedule::new(vec![1, 1])).unwrap(), 7);
    }

    #[test]
    fn length_is_exact_threshold() {
        let c = canonical_pair();
        let s = Schedule::new(vec![2, 1]);
        let n = codeword_length(&c, &s).unwrap();
        assert!(joint_error_bound(&c, &s, n).unwrap() <= c.pe());
        assert!(joint_error_bound(&c, &s, n - 1).unwrap() > c.pe());
    }

    #[test]
    fn length_error_cases() {
        let c = canonical().with_rho(0.0).unwrap();
        let s = Schedule::new(vec![1]);
        match codeword_length(&c, &s) {
            Err(CodingError::UnreachableReliability { bound }) => assert_eq!(bound, 1.0),
            other => panic!("expected unreachable-reliability, got {other:?}"),
        }
        assert_eq!(
            codeword_length(&canonical(), &Schedule::new(vec![0])),
            Err(CodingError::IdleSchedule)
        );
        assert_eq!(
            codeword_length(&canonical(), &Schedule::new(vec![1, 1])),
            Err(CodingError::DimensionMismatch { schedule: 2, config: 1 })
        );
    }

    #[test]
    fn length_cap_fires_for_hopeless_targets() {
        // Tiny exponent, huge alphabet: rho small but positive.
        let c = CodingConfig::from_ln_alphabets(
            vec![1e9],
            ChannelParams::new(vec![0.1], 1.0).unwrap(),
            1e-3,
            0.01,
        )
        .unwrap();
        assert_eq!(
            codeword_length(&c, &Schedule::new(vec![1])),
            Err(CodingError::LengthCapExceeded { cap: LENGTH_CAP })
        );
    }

    #[test]
    fn bounds_collapse_for_single_subset() {
        let c = canonical();
        let (lo, hi) = codeword_length_bounds(&c, &Schedule::new(vec![1])).unwrap();
        // (ln 100 + ln 2) / ln 2.5 = 5.78..., so six whole quanta.
        assert_eq!((lo, hi), (6, 6));
    }

    #[test]
    fn bounds_bracket_two_user_requirement() {
        let c = canonical_pair();
        let s = Schedule::new(vec![1, 1]);
        let (lo, hi) = codeword_length_bounds(&c, &s).unwrap();
        let n = codeword_length(&c, &s).unwrap();
        assert_eq!((lo, hi), (6, 8));
        assert!(lo <= n && n <= hi);
    }

    #[test]
    fn exponent_table_covers_active_subsets() {
        let c = canonical_pair();
        let table = ExponentTable::for_schedule(&c, &Schedule::new(vec![1, 1])).unwrap();
        assert_eq!(table.len(), 3);
        assert_eq!(table.exponent(0b11).unwrap(), error_exponent(&c, 0b11).unwrap());
        assert!(table.exponent(0b100).is_none());

        let one_active = ExponentTable::for_schedule(&c, &Schedule::new(vec![2, 0])).unwrap();
        assert_eq!(one_active.len(), 1);
        assert!(one_active.exponent(0b10).is_none());
    }

    #[test]
    fn limit_rates_match_hand_computed_cases() {
        let ch = ChannelParams::new(vec![1.0, 1.0], 1.0).unwrap();
        let r = asymptotic_rates_limit(&ch, &Schedule::new(vec![1, 1])).unwrap();
        let half_ln3 = 3.0f64.ln() / 2.0;
        assert!((r[0] - half_ln3).abs() < 1e-15);
        assert!((r[1] - half_ln3).abs() < 1e-15);

        let r31 = asymptotic_rates_limit(&ch, &Schedule::new(vec![3, 1])).unwrap();
        // Binding subset is {1} alone: g = ln 2 / 3.
        assert!((r31[0] - 2.0f64.ln()).abs() < 1e-15);
        assert!((r31[1] - 2.0f64.ln() / 3.0).abs() < 1e-15);

        let single = asymptotic_rates_limit(&ch, &Schedule::new(vec![1, 0])).unwrap();
        assert!((single[0] - 2.0f64.ln()).abs() < 1e-15);
        assert_eq!(single[1], 0.0);
    }

    #[test]
    fn fixed_rho_rates_converge_to_limit() {
        let ch = ChannelParams::new(vec![3.0, 1.0], 1.0).unwrap();
        let s = Schedule::new(vec![2, 1]);
        let limit = asymptotic_rates_limit(&ch, &s).unwrap();
        let at_zero = asymptotic_rates_fixed_rho(&ch, 0.0, &s).unwrap();
        for (a, b) in at_zero.iter().zip(&limit) {
            assert!((a - b).abs() < 1e-15);
        }
        let small = asymptotic_rates_fixed_rho(&ch, 1e-4, &s).unwrap();
        for (a, b) in small.iter().zip(&limit) {
            assert!((a - b).abs() < 1e-3);
            assert!(a < b);
        }
    }

    #[test]
    fn rho_grid_prefers_shortest_length() {
        let c = canonical();
        let s = Schedule::new(vec![1]);
        let (rho, n) = best_rho_on_grid(&c, &s, &DEFAULT_RHO_GRID).unwrap();
        assert_eq!(rho, 1.0);
        assert_eq!(n, 6);

        // A grid of only rho = 0 must surface the unreachable error.
        assert!(matches!(
            best_rho_on_grid(&c, &s, &[0.0]),
            Err(CodingError::UnreachableReliability { .. })
        ));
    }

    #[test]
    fn schedule_display_is_comma_separated() {
        use alloc::string::ToString;
        assert_eq!(Schedule::new(vec![1, 0, 2]).to_string(), "1,0,2");
    }

    #[test]
    fn config_validation() {
        let ch = ChannelParams::new(vec![1.0], 1.0).unwrap();
        assert!(CodingConfig::new(&[1], ch.clone(), 0.5, 0.01).is_err());
        assert!(CodingConfig::new(&[2], ch.clone(), 1.5, 0.01).is_err());
        assert!(CodingConfig::new(&[2], ch.clone(), 0.5, 0.0).is_err());
        assert!(CodingConfig::new(&[2], ch.clone(), 0.5, 1.0).is_err());
        assert!(CodingConfig::new(&[2, 2], ch, 0.5, 0.01).is_err());
        assert!(ChannelParams::new(vec![], 1.0).is_err());
        assert!(ChannelParams::new(vec![-1.0], 1.0).is_err());
        assert!(ChannelParams::new(vec![1.0], 0.0).is_err());
    }
}
