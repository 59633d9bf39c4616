//! Failure-probability profiles, the cumulative failure-product series, and
//! the stationary distribution of the NACK-count chain.
//!
//! State `m` counts consecutive decoding failures since the last success.
//! From state `m` the chain moves to state 0 with probability `1 - eps_m`
//! (success) and to `m + 1` with probability `eps_m`. With the cumulative
//! products `xi_0 = 1`, `xi_j = eps_0 * ... * eps_{j-1}`, the stationary
//! probabilities are `pi_m = xi_m / sum_j xi_j`. All series are evaluated
//! with an exact geometric tail keyed to the last tracked failure
//! probability, so the truncation depth is not a hidden accuracy knob.

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::policy::PowerPolicy;

/// Products below this are flushed to zero; the analytic tail keeps every
/// series exact to working precision regardless.
const XI_FLOOR: f64 = 1e-15;

/// Compensated (Kahan) accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}

/// Per-state decoding-failure probabilities `eps_0 ..= eps_{M-1}` with the
/// constant-tail rule `eps_m = eps_{M-1}` for `m >= M`, plus the derived
/// cumulative products `xi_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorProfile {
    eps: Vec<f64>,
    /// `xi[j]` for `j = 0 ..= M`; beyond `M` the series continues
    /// geometrically with ratio `eps[M-1]`.
    xi: Vec<f64>,
}

impl ErrorProfile {
    /// Profile from explicit failure probabilities, each in `[0, 1]`.
    pub fn new(eps: Vec<f64>) -> Result<Self> {
        if eps.is_empty() {
            return Err(Error::InvalidProfile("profile is empty".into()));
        }
        for (m, &e) in eps.iter().enumerate() {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidProfile(format!(
                    "failure probability for state {m} must be in [0, 1], got {e}"
                )));
            }
        }
        let mut xi = Vec::with_capacity(eps.len() + 1);
        let mut cur = 1.0;
        xi.push(cur);
        for &e in &eps {
            cur *= e;
            if cur < XI_FLOOR {
                cur = 0.0;
            }
            xi.push(cur);
        }
        Ok(ErrorProfile { eps, xi })
    }

    /// Profile of a power policy over the given channel: state `m` fails with
    /// probability `Pr{z < (2^rate - 1) / P_m}`.
    pub fn from_policy(policy: &PowerPolicy, model: &ChannelModel, rate: f64) -> Result<Self> {
        let eps = policy
            .powers()
            .iter()
            .map(|&p| model.failure_probability(p, rate))
            .collect::<Result<Vec<_>>>()?;
        Self::new(eps)
    }

    /// Profile with the same failure probability `p` in every state
    /// (no power control).
    pub fn constant(p: f64, states: usize) -> Result<Self> {
        Self::new(vec![p; states])
    }

    /// Number of tracked states `M`.
    pub fn states(&self) -> usize {
        self.eps.len()
    }

    /// The tracked failure probabilities.
    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    /// Failure probability of state `m`, with the constant-tail rule.
    pub fn eps_at(&self, m: usize) -> f64 {
        self.eps[m.min(self.eps.len() - 1)]
    }

    /// Geometric ratio of the series tail.
    fn tail_ratio(&self) -> f64 {
        self.eps[self.eps.len() - 1]
    }

    /// Cumulative failure product `xi_j`, extended geometrically beyond the
    /// tracked range.
    pub fn xi_at(&self, j: usize) -> f64 {
        let m = self.states();
        if j <= m {
            self.xi[j]
        } else {
            self.xi[m] * self.tail_ratio().powf((j - m) as f64)
        }
    }

    /// Whether the series `sum_j xi_j` converges: either the products reach
    /// exact zero or the tail ratio is below one.
    pub fn converges(&self) -> bool {
        self.xi[self.states()] == 0.0 || self.tail_ratio() < 1.0
    }

    fn require_convergent(&self) -> Result<()> {
        if self.converges() {
            Ok(())
        } else {
            Err(Error::DivergentSeries)
        }
    }

    /// `sum_{j>=0} xi_j`, the mean number of slots per update cycle.
    pub fn xi_sum(&self) -> Result<f64> {
        self.require_convergent()?;
        let m = self.states();
        let mut acc = KahanSum::default();
        for j in 0..m {
            acc.add(self.xi[j]);
        }
        if self.xi[m] > 0.0 {
            acc.add(self.xi[m] / (1.0 - self.tail_ratio()));
        }
        Ok(acc.value())
    }

    /// `sum_{j>=0} j * xi_j`.
    pub fn weighted_xi_sum(&self) -> Result<f64> {
        self.require_convergent()?;
        let m = self.states();
        let mut acc = KahanSum::default();
        for j in 1..m {
            acc.add(j as f64 * self.xi[j]);
        }
        if self.xi[m] > 0.0 {
            let r = self.tail_ratio();
            acc.add(self.xi[m] * (m as f64 + r / (1.0 - r)) / (1.0 - r));
        }
        Ok(acc.value())
    }

    /// Stationary distribution of the NACK-count chain,
    /// `pi_m = xi_m / sum_j xi_j`, with the mass of states `>= M` reported as
    /// tail mass.
    ///
    /// Fails with [`Error::DegenerateProfile`] when the chain never returns
    /// to state 0 (e.g. every failure probability is 1).
    pub fn steady_state(&self) -> Result<SteadyState> {
        if !self.converges() {
            return Err(Error::DegenerateProfile);
        }
        let norm = self.xi_sum()?;
        let m = self.states();
        let pi = (0..m).map(|j| self.xi[j] / norm).collect();
        let tail_sum = if self.xi[m] > 0.0 {
            self.xi[m] / (1.0 - self.tail_ratio())
        } else {
            0.0
        };
        Ok(SteadyState {
            pi,
            tail_mass: tail_sum / norm,
        })
    }
}

/// Stationary distribution over the tracked NACK-count states plus the
/// aggregated mass of the untracked tail.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pi: Vec<f64>,
    tail_mass: f64,
}

impl SteadyState {
    /// Probabilities of states `0 ..= M-1`.
    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// Aggregated probability of states `m >= M`.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Number of tracked states `M`.
    pub fn states(&self) -> usize {
        self.pi.len()
    }

    /// Total reported mass, `sum_m pi_m + tail`.
    pub fn total_mass(&self) -> f64 {
        let mut acc = KahanSum::default();
        for &p in &self.pi {
            acc.add(p);
        }
        acc.add(self.tail_mass);
        acc.value()
    }
}

/// Long-run average transmit power `sum_m P_m pi_m`, with the tail mass
/// charged at the last tracked power level.
///
/// # Panics
/// Panics if the policy and the steady state track different state counts.
pub fn average_power(policy: &PowerPolicy, ss: &SteadyState) -> f64 {
    assert_eq!(
        policy.states(),
        ss.states(),
        "policy and steady state must share the truncation depth"
    );
    let mut acc = KahanSum::default();
    for (&p, &pi) in policy.powers().iter().zip(ss.pi()) {
        acc.add(p * pi);
    }
    acc.add(policy.power_at(policy.states()) * ss.tail_mass());
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(eps: &[f64]) -> ErrorProfile {
        ErrorProfile::new(eps.to_vec()).unwrap()
    }

    #[test]
    fn profile_from_constant_policy_is_constant() {
        let model = ChannelModel::RayleighUnitMean;
        let policy = PowerPolicy::constant(0.25, 6).unwrap();
        let prof = ErrorProfile::from_policy(&policy, &model, 1.0).unwrap();
        let p = model.failure_probability(0.25, 1.0).unwrap();
        assert!(prof.eps().iter().all(|&e| e == p));
    }

    #[test]
    fn profile_from_on_off_policy() {
        let model = ChannelModel::RayleighUnitMean;
        let policy = PowerPolicy::on_off(2, 0.9, 5).unwrap();
        let prof = ErrorProfile::from_policy(&policy, &model, 1.0).unwrap();
        let on = model.failure_probability(0.9, 1.0).unwrap();
        assert_eq!(prof.eps()[0], 1.0);
        assert_eq!(prof.eps()[1], 1.0);
        assert!(prof.eps()[2..].iter().all(|&e| e == on));
    }

    #[test]
    fn single_state_profile() {
        let model = ChannelModel::RayleighUnitMean;
        let policy = PowerPolicy::constant(1.0, 1).unwrap();
        let prof = ErrorProfile::from_policy(&policy, &model, 1.0).unwrap();
        assert_eq!(prof.states(), 1);
        assert!((prof.eps()[0] - 0.632_120_558_828_557_7).abs() < 1e-12);
    }

    #[test]
    fn xi_products_and_tail() {
        let prof = profile(&[0.5, 0.25]);
        assert_eq!(prof.xi_at(0), 1.0);
        assert_eq!(prof.xi_at(1), 0.5);
        assert_eq!(prof.xi_at(2), 0.125);
        // beyond the tracked range the ratio is eps[M-1] = 0.25
        assert!((prof.xi_at(3) - 0.03125).abs() < 1e-15);
        assert!((prof.xi_at(4) - 0.0078125).abs() < 1e-15);
    }

    #[test]
    fn zero_eps_truncates_xi() {
        let prof = profile(&[0.5, 0.0, 0.7]);
        assert_eq!(prof.xi_at(1), 0.5);
        assert_eq!(prof.xi_at(2), 0.0);
        assert_eq!(prof.xi_at(3), 0.0);
        assert_eq!(prof.xi_at(10), 0.0);
    }

    #[test]
    fn steady_state_all_success() {
        let ss = profile(&[0.0, 0.0, 0.0]).steady_state().unwrap();
        assert_eq!(ss.pi(), &[1.0, 0.0, 0.0]);
        assert_eq!(ss.tail_mass(), 0.0);
    }

    #[test]
    fn steady_state_constant_is_geometric() {
        let p = 0.5;
        let ss = ErrorProfile::constant(p, 8)
            .unwrap()
            .steady_state()
            .unwrap();
        for (m, &pi) in ss.pi().iter().enumerate() {
            let expect = (1.0 - p) * p.powi(m as i32);
            assert!((pi - expect).abs() < 1e-12, "state {m}: {pi} vs {expect}");
        }
        assert!((ss.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn steady_state_two_term_example() {
        let ss = profile(&[0.5, 0.0, 0.0]).steady_state().unwrap();
        assert!((ss.pi()[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((ss.pi()[1] - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(ss.pi()[2], 0.0);
    }

    #[test]
    fn degenerate_profile_is_rejected() {
        assert_eq!(
            profile(&[1.0, 1.0]).steady_state().unwrap_err(),
            Error::DegenerateProfile
        );
        // transient: positive probability of reaching the all-failure tail
        assert_eq!(
            profile(&[0.5, 1.0]).steady_state().unwrap_err(),
            Error::DegenerateProfile
        );
        // but an exact zero before the all-one tail keeps the chain positive
        // recurrent on the reachable states
        assert!(profile(&[0.0, 1.0]).steady_state().is_ok());
    }

    #[test]
    fn balance_equations_hold() {
        let prof = profile(&[0.3, 0.8, 0.16, 0.95]);
        let ss = prof.steady_state().unwrap();
        for m in 0..prof.states() - 1 {
            assert!((ss.pi()[m + 1] - prof.eps()[m] * ss.pi()[m]).abs() < 1e-14);
        }
        // pi_0 = sum_m (1 - eps_m) pi_m, with the tail at the last eps
        let mut inflow = 0.0;
        for m in 0..prof.states() - 1 {
            inflow += (1.0 - prof.eps()[m]) * ss.pi()[m];
        }
        let last = prof.states() - 1;
        inflow += (1.0 - prof.eps()[last]) * (ss.pi()[last] + ss.tail_mass());
        assert!((ss.pi()[0] - inflow).abs() < 1e-12);
    }

    #[test]
    fn average_power_examples() {
        let model = ChannelModel::RayleighUnitMean;

        let policy = PowerPolicy::constant(0.7, 5).unwrap();
        let ss = ErrorProfile::from_policy(&policy, &model, 1.0)
            .unwrap()
            .steady_state()
            .unwrap();
        assert!((average_power(&policy, &ss) - 0.7).abs() < 1e-12);

        // on-off tau = 1: average is the on-level times the transmitting
        // fraction 1/(tau (1 - eps) + 1)
        let policy = PowerPolicy::on_off(1, 0.9, 50).unwrap();
        let prof = ErrorProfile::from_policy(&policy, &model, 1.0).unwrap();
        let ss = prof.steady_state().unwrap();
        let eps = model.failure_probability(0.9, 1.0).unwrap();
        let expect = 0.9 / (1.0 * (1.0 - eps) + 1.0);
        assert!((average_power(&policy, &ss) - expect).abs() < 1e-12);

        // all-silent policy spends nothing no matter the occupancy
        let silent = PowerPolicy::new(vec![0.0; 5]).unwrap();
        assert_eq!(average_power(&silent, &ss_of(&[0.2; 5])), 0.0);
    }

    fn ss_of(eps: &[f64]) -> SteadyState {
        profile(eps).steady_state().unwrap()
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn eps_vec() -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(0.0f64..0.999, 1..20)
        }

        proptest! {
            #[test]
            fn xi_is_non_increasing_and_bounded(eps in eps_vec()) {
                let prof = ErrorProfile::new(eps).unwrap();
                for j in 0..prof.states() {
                    prop_assert!(prof.xi_at(j + 1) <= prof.xi_at(j));
                    prop_assert!((0.0..=1.0).contains(&prof.xi_at(j)));
                }
            }

            #[test]
            fn steady_state_sums_to_one(eps in eps_vec()) {
                let ss = ErrorProfile::new(eps).unwrap().steady_state().unwrap();
                prop_assert!((ss.total_mass() - 1.0).abs() < 1e-12);
                prop_assert!(ss.pi().iter().all(|&p| p >= 0.0));
                prop_assert!(ss.tail_mass() >= 0.0);
            }
        }
    }
}
