//! Slot-level Monte Carlo simulation of the status-update process.
//!
//! Each slot draws an independent channel gain; the packet sent in NACK
//! state `m` (with the constant-tail power rule) succeeds iff the gain
//! reaches the decoding threshold. The empirical average age is accumulated
//! through the per-cycle trapezoid statistic
//!
//! ```text
//! aoi ~= sum_k Y_k (2 + Y_k) / 2  /  sum_k Y_k
//! ```
//!
//! over completed cycles, the trailing incomplete cycle being discarded.

use crate::age;
use crate::channel::{decoding_threshold, ChannelModel};
use crate::error::{Error, Result};
use crate::markov::{ErrorProfile, KahanSum};
use crate::policy::PowerPolicy;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Default trajectory length in slots.
pub const DEFAULT_SLOTS: u64 = 1_000_000;

/// Cycle count below which the goodness-of-fit check refuses to run.
pub const CYCLE_FIT_MIN_CYCLES: u64 = 1000;

/// Total-variation threshold of the goodness-of-fit flag.
pub const CYCLE_FIT_TOLERANCE: f64 = 0.01;

const CONFIDENCE_BATCHES: u64 = 20;
/// 97.5% standard-normal quantile (95% two-sided interval).
const NORMAL_95: f64 = 1.959_963_984_540_054;

/// One simulation run: a policy, a channel, a rate, a length, and a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub policy: PowerPolicy,
    pub model: ChannelModel,
    /// Transmission rate `R` in bits per slot per unit bandwidth.
    pub rate: f64,
    /// Trajectory length in slots.
    pub slots: u64,
    pub seed: u64,
}

impl SimConfig {
    /// Configuration with the default trajectory length and seed 0.
    pub fn new(policy: PowerPolicy, model: ChannelModel, rate: f64) -> Self {
        SimConfig {
            policy,
            model,
            rate,
            slots: DEFAULT_SLOTS,
            seed: 0,
        }
    }
}

/// Empirical statistics of one simulated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    /// Trapezoid estimate of the average age, in slots.
    pub average_aoi: f64,
    /// Completed update cycles.
    pub cycles: u64,
    /// `cycle_histogram[m - 1]` counts cycles of length `m`.
    pub cycle_histogram: Vec<u64>,
    /// Time-average transmit power over all slots, in watts.
    pub average_power: f64,
    /// Batch-means standard error of the age estimate.
    pub aoi_std_error: f64,
    /// 95% confidence half-width of the age estimate.
    pub aoi_half_width: f64,
    /// Slots spent in each tracked state.
    pub state_occupancy: Vec<u64>,
    /// Slots spent in states beyond the tracked range.
    pub tail_occupancy: u64,
    /// Trajectory length the report was computed from.
    pub slots: u64,
    /// Seed the trajectory was driven by.
    pub seed: u64,
}

/// Runs one trajectory. Identical configurations produce identical reports.
///
/// Fails with [`Error::NoCompleteCycle`] when not a single update succeeds.
pub fn simulate(cfg: &SimConfig) -> Result<SimReport> {
    if cfg.slots == 0 {
        return Err(Error::InvalidConfig("at least one slot is required".into()));
    }
    if !cfg.rate.is_finite() || cfg.rate <= 0.0 {
        return Err(Error::InvalidRate(cfg.rate));
    }
    let states = cfg.policy.states();
    let thresholds: Vec<f64> = (0..states)
        .map(|m| decoding_threshold(cfg.policy.power_at(m), cfg.rate))
        .collect();

    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut state = 0usize;
    let mut cycle_lengths: Vec<u32> = Vec::new();
    let mut histogram: Vec<u64> = Vec::new();
    let mut occupancy = vec![0u64; states];
    let mut tail_occupancy = 0u64;
    let mut power_sum = KahanSum::default();

    for _ in 0..cfg.slots {
        let tracked = state.min(states - 1);
        if state < states {
            occupancy[state] += 1;
        } else {
            tail_occupancy += 1;
        }
        power_sum.add(cfg.policy.power_at(state));
        let gain = cfg.model.sample_gain(&mut rng);
        if gain >= thresholds[tracked] {
            let length = state as u64 + 1;
            cycle_lengths.push(length as u32);
            if histogram.len() < length as usize {
                histogram.resize(length as usize, 0);
            }
            histogram[length as usize - 1] += 1;
            state = 0;
        } else {
            state += 1;
        }
    }

    let cycles = cycle_lengths.len() as u64;
    if cycles == 0 {
        return Err(Error::NoCompleteCycle);
    }

    // Exact integer accumulation of sum Y (2 + Y) and sum Y.
    let mut area_twice = 0u128;
    let mut total_len = 0u128;
    for &y in &cycle_lengths {
        let y = y as u128;
        area_twice += y * (2 + y);
        total_len += y;
    }
    let average_aoi = area_twice as f64 / (2.0 * total_len as f64);

    let (aoi_std_error, aoi_half_width) = batch_means_error(&cycle_lengths);

    Ok(SimReport {
        average_aoi,
        cycles,
        cycle_histogram: histogram,
        average_power: power_sum.value() / cfg.slots as f64,
        aoi_std_error,
        aoi_half_width,
        state_occupancy: occupancy,
        tail_occupancy,
        slots: cfg.slots,
        seed: cfg.seed,
    })
}

/// Standard error and 95% half-width of the age estimate from batch means
/// over (up to) 20 equal batches of cycles.
fn batch_means_error(cycle_lengths: &[u32]) -> (f64, f64) {
    let k = cycle_lengths.len() as u64;
    let batches = CONFIDENCE_BATCHES.min(k);
    if batches < 2 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let mut ratios = Vec::with_capacity(batches as usize);
    let base = k / batches;
    let extra = k % batches;
    let mut start = 0usize;
    for b in 0..batches {
        let len = (base + u64::from(b < extra)) as usize;
        let slice = &cycle_lengths[start..start + len];
        start += len;
        let mut area_twice = 0u128;
        let mut total = 0u128;
        for &y in slice {
            let y = y as u128;
            area_twice += y * (2 + y);
            total += y;
        }
        ratios.push(area_twice as f64 / (2.0 * total as f64));
    }
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let var = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0);
    let std_error = (var / n).sqrt();
    (std_error, NORMAL_95 * std_error)
}

/// Goodness-of-fit of an empirical cycle-length histogram against a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleFit {
    /// Total-variation distance between the empirical histogram and the
    /// analytic cycle-length distribution.
    pub tv_distance: f64,
    /// Cycles the histogram was built from.
    pub cycles: u64,
    /// `tv_distance < 0.01`; meaningful from about 1e5 cycles up.
    pub within_tolerance: bool,
}

/// Compares the report's cycle-length histogram with the analytic
/// distribution of the given profile.
///
/// Fails with [`Error::InsufficientCycles`] below 1000 cycles.
pub fn empirical_cycle_check(report: &SimReport, profile: &ErrorProfile) -> Result<CycleFit> {
    if report.cycles < CYCLE_FIT_MIN_CYCLES {
        return Err(Error::InsufficientCycles {
            got: report.cycles,
            min: CYCLE_FIT_MIN_CYCLES,
        });
    }
    let k = report.cycles as f64;
    let mut l1 = KahanSum::default();
    let mut covered = KahanSum::default();
    for (i, &count) in report.cycle_histogram.iter().enumerate() {
        let p = age::cycle_length_pmf(profile, i + 1);
        l1.add((count as f64 / k - p).abs());
        covered.add(p);
    }
    // analytic mass beyond the longest observed cycle
    let analytic_tail = (1.0 - covered.value()).max(0.0);
    let tv_distance = 0.5 * (l1.value() + analytic_tail);
    Ok(CycleFit {
        tv_distance,
        cycles: report.cycles,
        within_tolerance: tv_distance < CYCLE_FIT_TOLERANCE,
    })
}
