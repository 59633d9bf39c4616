//! Closed-form average age of information and update-cycle statistics.
//!
//! A cycle is the span between two consecutive successful updates. Cycle
//! lengths `Y` satisfy `Pr{Y = m} = xi_{m-1} (1 - eps_{m-1})`, their first
//! two moments are `E{Y} = sum_j xi_j` and `E{Y^2} = 2 sum_j j xi_j + sum_j
//! xi_j`, and the long-run average age is
//!
//! ```text
//! aoi = 1 + E{Y^2} / (2 E{Y}) = 3/2 + (sum_j j xi_j) / (sum_j xi_j)
//! ```
//!
//! which is bounded below by 1.5: one fresh update per slot, every slot
//! received.

use crate::error::{Error, Result};
use crate::markov::ErrorProfile;

/// Smallest achievable average age, attained when every update succeeds.
pub const AOI_LOWER_BOUND: f64 = 1.5;

/// Long-run average age of information of the update process with the given
/// failure profile, in slots.
///
/// Fails with [`Error::DivergentSeries`] when the cycle-length distribution
/// has no finite mean (the tail failure probability is 1 and reachable).
pub fn average_aoi(profile: &ErrorProfile) -> Result<f64> {
    let s0 = profile.xi_sum()?;
    let s1 = profile.weighted_xi_sum()?;
    Ok(1.5 + s1 / s0)
}

/// Average age under a constant failure probability `p` (no power control):
/// `(3 - p) / (2 (1 - p))`, the closed form of the general series for
/// geometric cycles (`xi_j = p^j`, so `sum xi = 1/(1-p)` and
/// `sum j xi_j = p/(1-p)^2`).
pub fn average_aoi_constant_power(p: f64) -> Result<f64> {
    if p == 1.0 {
        return Err(Error::DivergentSeries);
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidProfile(format!(
            "failure probability must be in [0, 1), got {p}"
        )));
    }
    Ok((3.0 - p) / (2.0 * (1.0 - p)))
}

/// Probability that an update cycle spans exactly `m` slots,
/// `xi_{m-1} (1 - eps_{m-1})`.
///
/// # Panics
/// Panics if `m` is zero; cycle lengths start at 1.
pub fn cycle_length_pmf(profile: &ErrorProfile, m: usize) -> f64 {
    assert!(m >= 1, "cycle lengths start at 1");
    profile.xi_at(m - 1) * (1.0 - profile.eps_at(m - 1))
}

/// Mean cycle length `E{Y} = sum_j xi_j`.
pub fn mean_cycle_length(profile: &ErrorProfile) -> Result<f64> {
    profile.xi_sum()
}

/// Second moment of the cycle length,
/// `E{Y^2} = 2 sum_j j xi_j + sum_j xi_j`.
pub fn second_moment_cycle_length(profile: &ErrorProfile) -> Result<f64> {
    Ok(2.0 * profile.weighted_xi_sum()? + profile.xi_sum()?)
}
