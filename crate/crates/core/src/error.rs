//! Error type shared by the analysis, optimization, and simulation modules.

use thiserror::Error;

/// Errors produced by this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Transmission rate must be positive and finite.
    #[error("transmission rate must be positive and finite, got {0}")]
    InvalidRate(f64),

    /// Transmit power must be non-negative and finite.
    #[error("transmit power must be non-negative and finite, got {0}")]
    InvalidPower(f64),

    /// No finite power maps to the requested failure probability.
    #[error(
        "failure probability {0} is not reachable: it must lie in (0, 1] \
             (zero failure probability would require unbounded power)"
    )]
    UnreachableEpsilon(f64),

    /// A configuration value is out of range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A power policy violates its construction rules.
    #[error("invalid power policy: {0}")]
    InvalidPolicy(String),

    /// A failure-probability profile violates its construction rules.
    #[error("invalid failure profile: {0}")]
    InvalidProfile(String),

    /// Every reachable state fails with certainty, so the chain never returns
    /// to state 0 and no stationary distribution exists.
    #[error("degenerate failure profile: the chain never returns to state 0")]
    DegenerateProfile,

    /// The cumulative failure-product series diverges.
    #[error("divergent series: the tail failure probability is 1")]
    DivergentSeries,

    /// No on-level satisfies the average power budget for this silent-state count.
    #[error("no transmit level meets the power budget for tau = {tau}")]
    InfeasibleTau { tau: usize },

    /// The annealer was started from a policy that violates the power budget.
    #[error("initial policy is infeasible: average power {achieved} W exceeds budget {budget} W")]
    InfeasibleInit { achieved: f64, budget: f64 },

    /// No candidate policy in the search range was feasible.
    #[error("no feasible policy found in the search range")]
    NoFeasiblePolicy,

    /// The simulation finished without a single successful update.
    #[error("simulation produced no completed update cycle")]
    NoCompleteCycle,

    /// Too few cycles for a meaningful goodness-of-fit check.
    #[error("goodness-of-fit needs at least {min} cycles, got {got}")]
    InsufficientCycles { got: u64, min: u64 },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
