//! Per-state transmit power policies.

use crate::error::{Error, Result};

/// Transmit powers indexed by the NACK-count state.
///
/// The vector covers states `0..M`; states `m >= M` reuse the last entry
/// (constant tail), mirroring the finite-state truncation of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerPolicy {
    powers: Vec<f64>,
    on_off: Option<OnOff>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OnOff {
    silent_states: usize,
    level: f64,
}

impl PowerPolicy {
    /// Policy from an explicit power vector. Entries must be non-negative and
    /// finite; the vector must not be empty.
    pub fn new(powers: Vec<f64>) -> Result<Self> {
        if powers.is_empty() {
            return Err(Error::InvalidPolicy("power vector is empty".into()));
        }
        for (m, &p) in powers.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidPolicy(format!(
                    "power for state {m} must be non-negative and finite, got {p}"
                )));
            }
        }
        Ok(PowerPolicy {
            powers,
            on_off: None,
        })
    }

    /// Same power in every state.
    pub fn constant(power: f64, states: usize) -> Result<Self> {
        Self::on_off(0, power, states)
    }

    /// Zero power for the first `silent_states` states, `level` afterwards.
    pub fn on_off(silent_states: usize, level: f64, states: usize) -> Result<Self> {
        if states == 0 {
            return Err(Error::InvalidPolicy("power vector is empty".into()));
        }
        if silent_states >= states {
            return Err(Error::InvalidPolicy(format!(
                "silent-state count {silent_states} must be below the state count {states}"
            )));
        }
        if !level.is_finite() || level < 0.0 {
            return Err(Error::InvalidPolicy(format!(
                "on-level must be non-negative and finite, got {level}"
            )));
        }
        let mut powers = vec![0.0; states];
        for p in powers.iter_mut().skip(silent_states) {
            *p = level;
        }
        Ok(PowerPolicy {
            powers,
            on_off: Some(OnOff {
                silent_states,
                level,
            }),
        })
    }

    /// Number of tracked states `M`.
    pub fn states(&self) -> usize {
        self.powers.len()
    }

    /// The tracked power vector `P_0 ..= P_{M-1}`.
    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    /// Power used in state `m`, with the constant-tail rule for `m >= M`.
    pub fn power_at(&self, state: usize) -> f64 {
        self.powers[state.min(self.powers.len() - 1)]
    }

    /// `(silent_states, level)` when this policy was built as an on-off policy.
    pub fn on_off_descriptor(&self) -> Option<(usize, f64)> {
        self.on_off.map(|d| (d.silent_states, d.level))
    }
}
