//! Average age-of-information (AoI) analysis and power control for slotted
//! status-update systems over block-fading channels.
//!
//! A source generates a fresh update every slot and sends it at a fixed rate;
//! the receiver returns a NACK on decoding failure, and the transmit power is
//! adapted to the number of consecutive NACKs. This crate provides:
//!
//! - [`channel`]: fading-gain distributions and the bidirectional mapping
//!   between transmit power and decoding-failure probability;
//! - [`markov`]: the NACK-count chain — failure profiles, the cumulative
//!   failure-product series, stationary distribution, average power;
//! - [`age`]: the closed-form average AoI and update-cycle statistics;
//! - [`optimize`]: AoI minimization under an average-power budget — an
//!   exhaustive on-off baseline and a Cauchy-perturbation simulated annealer;
//! - [`sim`]: a slot-level Monte Carlo simulator for validating the analysis.
//!
//! ```
//! use aoi_power::{average_aoi, ChannelModel, ErrorProfile, PowerPolicy};
//!
//! let model = ChannelModel::RayleighUnitMean;
//! let policy = PowerPolicy::constant(1.0, 300).unwrap();
//! let profile = ErrorProfile::from_policy(&policy, &model, 1.0).unwrap();
//! let aoi = average_aoi(&profile).unwrap();
//! assert!(aoi > 1.5);
//! ```

pub mod age;
pub mod channel;
pub mod error;
pub mod markov;
pub mod optimize;
pub mod policy;
pub mod seed;
pub mod sim;

pub use age::{
    average_aoi, average_aoi_constant_power, cycle_length_pmf, mean_cycle_length,
    second_moment_cycle_length, AOI_LOWER_BOUND,
};
pub use channel::{decoding_threshold, ChannelModel, LinkConfig};
pub use error::{Error, Result};
pub use markov::{average_power, ErrorProfile, SteadyState};
pub use optimize::{
    accept_probability, anneal, evaluate_policy, onoff_power_for_tau, optimize_onoff,
    AnnealingConfig, OptimizationResult, PolicyEvaluation, StageStats, POWER_SLACK,
};
pub use policy::PowerPolicy;
pub use sim::{empirical_cycle_check, simulate, CycleFit, SimConfig, SimReport};
