//! Building blocks for scheduled multi-access communication with joint
//! decoding: how long a codeword has to be for a given reliability target,
//! which long-run message rates a schedule distribution can sustain, and
//! whether a concrete queueing system driven by such a policy is stable.
//!
//! The crate is organised around four layers:
//!
//! * [`coding`] evaluates the random-coding error bound for a schedule and
//!   turns it into a per-schedule codeword length.
//! * [`catalog`], [`policy`] and [`region`] enumerate bounded schedules,
//!   derive their service rates, and answer geometric questions about the
//!   achievable rate region (membership, policy synthesis, capacity checks).
//! * [`arrivals`], [`sim`] and [`lyapunov`] run a slotted discrete-time
//!   Markov chain of the queueing system and compute drift diagnostics.
//! * [`simplex`] is the small dense LP solver backing the region queries.
//!
//! Everything is `no_std` + `alloc`; float transcendentals go through
//! [`libm`] so results are identical across hosts.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod arrivals;
pub mod catalog;
pub mod coding;
pub mod lyapunov;
pub mod policy;
pub mod region;
pub mod rng;
pub mod sim;
pub mod simplex;

mod math;

pub use arrivals::{ArrivalModel, BatchDistribution};
pub use catalog::{enumerate_schedules, ClassId, ScheduleCatalog};
pub use coding::{
    asymptotic_rates_fixed_rho, asymptotic_rates_limit, best_rho_on_grid, codeword_length,
    codeword_length_bounds, error_exponent, joint_error_bound, ChannelParams, CodingConfig,
    CodingError, ExponentTable, Schedule, DEFAULT_RHO_GRID, LENGTH_CAP,
};
pub use lyapunov::{
    drift_offset, empirical_drift, quadratic_potential, transience_witness, weighted_backlog,
    DriftEstimate,
};
pub use policy::{psi, split_distribution, PolicySpec};
pub use region::{
    asymptotic_box, box_interior_contains, capacity_membership, capacity_radius,
    nat_rate_threshold, outer_bound_membership, outer_bound_radius, schedule_for_rate,
    synthesize_policy, CapacityCheck, OuterBoundCheck, RateUnit, RateVector, RegionError,
    RegionVerdict, REGION_TOL,
};
pub use rng::RngStreams;
pub use sim::{
    run, step, RunOptions, SimError, SimStats, SlotEvents, StabilityVerdict, StreamDigest,
    SystemState, SLOPE_TOL,
};
