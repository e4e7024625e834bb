//! Steady-state analysis and slot-level simulation of buffered slotted Aloha
//! with K-exponential backoff.
//!
//! An `n`-node network with aggregate Bernoulli arrival rate `rate`, cutoff
//! phase `K` and retransmission factor `q` is treated as `n` independent
//! Geo/G/1 queues coupled by the probability of success `p` of head-of-line
//! packets, which in steady state solves `p = exp(-rate/p)`. The crate
//! provides:
//!
//! * [`lambert`]: both real branches of the Lambert W function, which carry
//!   the two roots `p_l = exp(W_0(-rate))` and `p_s = exp(W_{-1}(-rate))`;
//! * [`steady_state`]: the head-of-line phase distribution, offered load,
//!   stable points and their dynamics, and the saturated-network fixed point
//!   `p_a`;
//! * [`regions`]: absolute / asymptotic / pseudo stable regions of the
//!   retransmission factor, maximum stable throughput, and configuration
//!   classification;
//! * [`sim`]: a deterministic slot-level simulator measuring success
//!   probability, attempt rate, throughput, offered load, phase occupancy
//!   and queue traces.
//!
//! Analysis code is generic over the scalar type through [`scalar::Real`];
//! the `*64` aliases below fix `f64`, which all tolerances are written for.
//! The simulator is concrete `f64`.

pub mod error;
pub mod lambert;
pub mod regions;
pub mod scalar;
pub mod sim;
mod solve;
pub mod steady_state;

pub use error::{Error, Result};
pub use lambert::{w0, wm1, WBranch};
pub use regions::{
    classify, max_stable_throughput, max_stable_throughput_approx, pseudo_region, q_lower,
    q_lower_approx, q_upper, q_upper_star, q_upper_star_approx, theorem5_epsilon_bound,
    Classification, StabilityMode,
};
pub use scalar::Real;
pub use sim::{
    capture_stats, derive_row_seed, run, sweep, CaptureStats, SimConfig, SimMetrics, Simulator,
    DEFAULT_SEED,
};
pub use steady_state::{
    attempt_rate, iterate_dynamics, network_throughput, offered_load, p_a_closed_form_exp,
    p_a_closed_form_geo, phase_distribution, saturated_fixed_point, saturated_map, stable_points,
    success_map, throughput_of_attempt_rate, Cutoff, Verdict,
};

/// `f64` instantiations of the generic analysis types.
pub type NetworkConfig64 = steady_state::NetworkConfig<f64>;
pub type PhaseDistribution64 = steady_state::PhaseDistribution<f64>;
pub type StablePoints64 = steady_state::StablePoints<f64>;
pub type SaturatedPoint64 = steady_state::SaturatedPoint<f64>;
pub type StabilityReport64 = regions::StabilityReport<f64>;
pub type MaxThroughputResult64 = regions::MaxThroughputResult<f64>;
pub type EpsilonBounds64 = regions::EpsilonBounds<f64>;
