//! Fading-gain distributions and the mapping between transmit power and
//! decoding-failure probability at a fixed transmission rate.
//!
//! A packet sent with power `p` over a slot with channel power gain `z`
//! decodes at rate `r` iff `r <= log2(1 + p * z)`, so the failure probability
//! is the gain CDF evaluated at the threshold `(2^r - 1) / p`.

use crate::error::{Error, Result};
use rand::Rng;

/// Fading-gain distribution of the wireless link.
///
/// The gain is the dimensionless channel power gain experienced by one slot;
/// gains are i.i.d. across slots (block fading). Sampling goes through the
/// inverse CDF of a single uniform draw, so one seeded uniform stream drives
/// every distribution reproducibly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel {
    /// Rayleigh fading with unit mean power gain: `z ~ Exp(1)`,
    /// `cdf(x) = 1 - exp(-x)`.
    RayleighUnitMean,
    /// Deterministic gain (point mass). A no-fading reference channel, also
    /// handy for driving simulations in which every transmission succeeds or
    /// fails surely. `gain` must be positive and finite.
    Constant { gain: f64 },
}

impl ChannelModel {
    /// Point-mass channel with the given fixed gain.
    pub fn constant(gain: f64) -> Result<Self> {
        if !gain.is_finite() || gain <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "constant channel gain must be positive and finite, got {gain}"
            )));
        }
        Ok(ChannelModel::Constant { gain })
    }

    /// Right-continuous CDF of the gain, `Pr{z <= x}`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            ChannelModel::RayleighUnitMean => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x).exp_m1()
                }
            }
            ChannelModel::Constant { gain } => {
                if x >= *gain {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Quantile function. For continuous models this inverts [`cdf`](Self::cdf)
    /// on the support interior; for a point mass every probability maps to the
    /// fixed gain.
    ///
    /// # Panics
    /// Panics if `p` is not in `[0, 1]`.
    pub fn inverse_cdf(&self, p: f64) -> f64 {
        assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
        match self {
            ChannelModel::RayleighUnitMean => -(-p).ln_1p(),
            ChannelModel::Constant { gain } => *gain,
        }
    }

    /// Draws one gain by inverse-CDF transform of a uniform variate.
    pub fn sample_gain<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.inverse_cdf(u)
    }

    /// Mean of the gain distribution.
    pub fn mean_gain(&self) -> f64 {
        match self {
            ChannelModel::RayleighUnitMean => 1.0,
            ChannelModel::Constant { gain } => *gain,
        }
    }

    /// Decoding-failure probability of one packet sent with `power` watts at
    /// `rate` bits/slot: `Pr{z < (2^rate - 1) / power}`.
    ///
    /// `power = 0` (a silent slot) maps to exactly 1, not through the CDF
    /// limit, so silent states of on-off policies fail surely.
    pub fn failure_probability(&self, power: f64, rate: f64) -> Result<f64> {
        check_rate(rate)?;
        if !power.is_finite() || power < 0.0 {
            return Err(Error::InvalidPower(power));
        }
        if power == 0.0 {
            return Ok(1.0);
        }
        let threshold = decoding_threshold(power, rate);
        Ok(match self {
            ChannelModel::RayleighUnitMean => self.cdf(threshold),
            // Strict comparison: a gain exactly at the threshold decodes.
            ChannelModel::Constant { gain } => {
                if *gain < threshold {
                    1.0
                } else {
                    0.0
                }
            }
        })
    }

    /// Smallest power whose failure probability is `eps`, the inverse of
    /// [`failure_probability`](Self::failure_probability) in its first
    /// argument. `eps = 1` maps to zero power; `eps <= 0` is unreachable.
    pub fn power_for_failure_probability(&self, eps: f64, rate: f64) -> Result<f64> {
        check_rate(rate)?;
        if eps.is_nan() || eps <= 0.0 || eps > 1.0 {
            return Err(Error::UnreachableEpsilon(eps));
        }
        if eps == 1.0 {
            return Ok(0.0);
        }
        match self {
            ChannelModel::RayleighUnitMean => Ok((rate.exp2() - 1.0) / self.inverse_cdf(eps)),
            // A point mass only realizes failure probabilities 0 and 1.
            ChannelModel::Constant { .. } => Err(Error::UnreachableEpsilon(eps)),
        }
    }
}

/// Gain below which decoding fails: `(2^rate - 1) / power`, infinite for a
/// silent slot.
pub fn decoding_threshold(power: f64, rate: f64) -> f64 {
    if power == 0.0 {
        f64::INFINITY
    } else {
        (rate.exp2() - 1.0) / power
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::InvalidRate(rate));
    }
    Ok(())
}

/// Link parameters shared by the analysis and the optimizer: fixed rate `R`,
/// average power budget, and the number of tracked NACK-count states `M`
/// (states `m >= M` reuse the last tracked power level).
///
/// Time is measured in slots; the slot duration is normalized to
/// [`SLOT_DURATION`](Self::SLOT_DURATION).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    /// Transmission rate `R` in bits per slot per unit bandwidth.
    pub rate: f64,
    /// Average transmit power budget in watts.
    pub avg_power: f64,
    /// Number of tracked NACK-count states.
    pub states: usize,
}

impl LinkConfig {
    /// Normalized slot duration.
    pub const SLOT_DURATION: f64 = 1.0;

    pub fn new(rate: f64, avg_power: f64, states: usize) -> Result<Self> {
        check_rate(rate)?;
        if !avg_power.is_finite() || avg_power <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "average power budget must be positive and finite, got {avg_power}"
            )));
        }
        if states == 0 {
            return Err(Error::InvalidConfig(
                "at least one tracked state is required".into(),
            ));
        }
        Ok(LinkConfig {
            rate,
            avg_power,
            states,
        })
    }
}
