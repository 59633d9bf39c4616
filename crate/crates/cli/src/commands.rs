//! The five experiment drivers.

use crate::output::{self, SweepRow};
use crate::spec::{dbw_to_watts, ResolvedSpec};
use anyhow::{Context, Result};
use aoi_power::{
    anneal, average_aoi_constant_power, evaluate_policy, onoff_power_for_tau, optimize_onoff, seed,
    simulate, AnnealingConfig, ChannelModel, LinkConfig, OptimizationResult, PowerPolicy,
    SimConfig,
};

const MODEL: ChannelModel = ChannelModel::RayleighUnitMean;

/// Policy under test: an ingested policy file, or the constant policy at the
/// power budget.
fn resolve_policy(spec: &ResolvedSpec) -> Result<PowerPolicy> {
    match &spec.policy {
        Some(path) => {
            let powers = output::read_policy_powers(path)?;
            Ok(PowerPolicy::new(powers)?)
        }
        None => {
            let pbar = spec
                .pbar_watts()
                .context("either --policy or --pbar-dbw must identify the policy to analyze")?;
            Ok(PowerPolicy::constant(pbar, spec.states)?)
        }
    }
}

pub fn evaluate(spec: &ResolvedSpec) -> Result<()> {
    let policy = resolve_policy(spec)?;
    let ev = evaluate_policy(&policy, &MODEL, spec.rate)?;
    eprintln!(
        "evaluate: aoi {} slots, average power {} W",
        ev.aoi, ev.average_power
    );
    output::write_output(spec, &output::render_evaluation(spec, &ev))
}

pub fn run_simulation(spec: &ResolvedSpec) -> Result<()> {
    let policy = resolve_policy(spec)?;
    let ev = evaluate_policy(&policy, &MODEL, spec.rate)?;
    let report = simulate(&SimConfig {
        policy,
        model: MODEL,
        rate: spec.rate,
        slots: spec.slots,
        seed: spec.seed,
    })?;
    eprintln!(
        "simulate: empirical aoi {} (analytic {}), {} cycles",
        report.average_aoi, ev.aoi, report.cycles
    );
    output::write_output(spec, &output::render_simulation(spec, &report, ev.aoi))
}

fn onoff_result(spec: &ResolvedSpec, link: &LinkConfig) -> Result<OptimizationResult> {
    match spec.tau {
        Some(tau) => {
            let policy = onoff_power_for_tau(tau, link, &MODEL)?;
            let ev = evaluate_policy(&policy, &MODEL, spec.rate)?;
            Ok(OptimizationResult {
                policy,
                aoi: ev.aoi,
                average_power: ev.average_power,
                feasible_candidates: 1,
                trace: Vec::new(),
                seed: 0,
            })
        }
        None => Ok(optimize_onoff(link, &MODEL, spec.tau_max)?),
    }
}

fn export_result(spec: &ResolvedSpec, result: &OptimizationResult) -> Result<()> {
    let ev = evaluate_policy(&result.policy, &MODEL, spec.rate)?;
    output::write_output(spec, &output::render_policy(spec, result, &ev))
}

pub fn optimize_onoff_cmd(spec: &ResolvedSpec) -> Result<()> {
    let pbar = spec.pbar_watts()?;
    let link = LinkConfig::new(spec.rate, pbar, spec.states)?;
    let result = onoff_result(spec, &link)?;
    let tau = result
        .policy
        .on_off_descriptor()
        .map(|(t, _)| t.to_string())
        .unwrap_or_else(|| "?".into());
    eprintln!(
        "optimize-onoff: tau {tau}, aoi {} slots, average power {} W",
        result.aoi, result.average_power
    );
    export_result(spec, &result)
}

fn sa_config(spec: &ResolvedSpec, seed: u64) -> AnnealingConfig {
    AnnealingConfig {
        initial_temperature: spec.t0,
        min_temperature: spec.tmin,
        candidates_per_stage: spec.candidates,
        ..AnnealingConfig::with_seed(seed)
    }
}

pub fn optimize_sa(spec: &ResolvedSpec) -> Result<()> {
    let pbar = spec.pbar_watts()?;
    let link = LinkConfig::new(spec.rate, pbar, spec.states)?;
    let init = optimize_onoff(&link, &MODEL, spec.tau_max)?;
    let result = anneal(&init.policy, &sa_config(spec, spec.seed), &link, &MODEL)?;
    eprintln!(
        "optimize-sa: aoi {} slots (init {}), average power {} W, {} feasible candidates",
        result.aoi, init.aoi, result.average_power, result.feasible_candidates
    );
    export_result(spec, &result)
}

/// One sweep grid point: constant-power age, on-off optimum, annealed
/// optimum, and optionally a Monte Carlo check of the annealed policy.
fn sweep_point(spec: &ResolvedSpec, index: usize, dbw: f64) -> SweepRow {
    let mut row = SweepRow {
        pbar_dbw: dbw,
        ..SweepRow::default()
    };
    let pbar = dbw_to_watts(dbw);
    let fail = |row: &mut SweepRow, e: anyhow::Error| {
        if row.error.is_none() {
            row.error = Some(e.to_string().replace(',', ";"));
        }
    };

    match MODEL
        .failure_probability(pbar, spec.rate)
        .map_err(anyhow::Error::from)
        .and_then(|p| Ok(average_aoi_constant_power(p)?))
    {
        Ok(aoi) => row.aoi_const = Some(aoi),
        Err(e) => fail(&mut row, e),
    }

    let link = match LinkConfig::new(spec.rate, pbar, spec.states) {
        Ok(l) => l,
        Err(e) => {
            fail(&mut row, e.into());
            return row;
        }
    };
    let init = match optimize_onoff(&link, &MODEL, spec.tau_max) {
        Ok(r) => {
            row.aoi_onoff = Some(r.aoi);
            r
        }
        Err(e) => {
            fail(&mut row, e.into());
            return row;
        }
    };
    let sa_seed = seed::derive_seed(spec.seed, &[index as u64]);
    let sa = match anneal(&init.policy, &sa_config(spec, sa_seed), &link, &MODEL) {
        Ok(r) => {
            row.aoi_sa = Some(r.aoi);
            r
        }
        Err(e) => {
            fail(&mut row, e.into());
            return row;
        }
    };
    if spec.simulate {
        let sim_seed = seed::derive_seed(spec.seed, &[index as u64, 1]);
        match simulate(&SimConfig {
            policy: sa.policy,
            model: MODEL,
            rate: spec.rate,
            slots: spec.slots,
            seed: sim_seed,
        }) {
            Ok(report) => {
                row.aoi_sim_sa = Some(report.average_aoi);
                row.ci_halfwidth = Some(report.aoi_half_width);
            }
            Err(e) => fail(&mut row, e.into()),
        }
    }
    row
}

pub fn sweep(spec: &ResolvedSpec) -> Result<()> {
    let grid = spec
        .pbar_grid_dbw
        .clone()
        .context("--pbar-grid-dbw is required for sweep")?;
    let rows: Vec<SweepRow> = grid
        .iter()
        .enumerate()
        .map(|(i, &dbw)| {
            let row = sweep_point(spec, i, dbw);
            eprintln!(
                "sweep: {dbw} dBW -> const {:?}, on-off {:?}, sa {:?}{}",
                row.aoi_const,
                row.aoi_onoff,
                row.aoi_sa,
                row.error
                    .as_deref()
                    .map(|e| format!(" [error: {e}]"))
                    .unwrap_or_default()
            );
            row
        })
        .collect();
    output::write_output(spec, &output::render_sweep(spec, &rows))
}
