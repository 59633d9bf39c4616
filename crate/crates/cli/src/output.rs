//! Output rendering (CSV with a `#`-commented manifest header, or JSON with a
//! manifest object) and policy-file ingestion. Floats are written with Rust's
//! shortest-roundtrip formatting, so re-reading a file reproduces the exact
//! values and identical runs produce byte-identical files.

use crate::spec::{OutputFormat, ResolvedSpec};
use anyhow::{bail, Context, Result};
use aoi_power::{OptimizationResult, PolicyEvaluation, SimReport};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;

/// One output cell: present, absent, or an error message (last column).
fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Plain-text form of a manifest value for `# key = value` lines: strings
/// unquoted, arrays comma-joined, integers without a trailing `.0`.
fn manifest_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(manifest_text)
            .collect::<Vec<_>>()
            .join(","),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                u.to_string()
            } else if let Some(i) = n.as_i64() {
                i.to_string()
            } else {
                n.as_f64().unwrap_or(f64::NAN).to_string()
            }
        }
        other => other.to_string(),
    }
}

fn manifest_comments(spec: &ResolvedSpec, extra: &[(&str, String)]) -> String {
    let mut s = String::new();
    for (k, v) in spec.manifest() {
        s.push_str(&format!("# {k} = {}\n", manifest_text(&v)));
    }
    for (k, v) in extra {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s
}

fn manifest_json(spec: &ResolvedSpec) -> Value {
    let mut map = Map::new();
    for (k, v) in spec.manifest() {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}

pub fn write_output(spec: &ResolvedSpec, content: &str) -> Result<()> {
    match &spec.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .context("writing to stdout"),
    }
}

// --- single-row reports ----------------------------------------------------

pub fn render_evaluation(spec: &ResolvedSpec, ev: &PolicyEvaluation) -> String {
    match spec.format {
        OutputFormat::Csv => format!(
            "{}aoi,average_power_w\n{},{}\n",
            manifest_comments(spec, &[]),
            ev.aoi,
            ev.average_power
        ),
        OutputFormat::Json => pretty(json!({
            "manifest": manifest_json(spec),
            "report": { "aoi": ev.aoi, "average_power_w": ev.average_power },
        })),
    }
}

pub fn render_simulation(spec: &ResolvedSpec, report: &SimReport, analytic_aoi: f64) -> String {
    match spec.format {
        OutputFormat::Csv => format!(
            "{}aoi_sim,aoi_analytic,cycles,average_power_w,ci_halfwidth\n{},{},{},{},{}\n",
            manifest_comments(spec, &[]),
            report.average_aoi,
            analytic_aoi,
            report.cycles,
            report.average_power,
            report.aoi_half_width
        ),
        OutputFormat::Json => pretty(json!({
            "manifest": manifest_json(spec),
            "report": {
                "aoi_sim": report.average_aoi,
                "aoi_analytic": analytic_aoi,
                "cycles": report.cycles,
                "average_power_w": report.average_power,
                "ci_halfwidth": report.aoi_half_width,
            },
        })),
    }
}

// --- policy files ------------------------------------------------------------

/// Writes an optimized policy as rows `(state, power_w, eps, pi)` plus a
/// summary header carrying the achieved age, power, and seed.
pub fn render_policy(
    spec: &ResolvedSpec,
    result: &OptimizationResult,
    ev: &PolicyEvaluation,
) -> String {
    let summary = [
        ("aoi", result.aoi.to_string()),
        ("average_power_w", result.average_power.to_string()),
        (
            "feasible_candidates",
            result.feasible_candidates.to_string(),
        ),
    ];
    match spec.format {
        OutputFormat::Csv => {
            let mut s = manifest_comments(spec, &summary);
            s.push_str("state,power_w,eps,pi\n");
            for (m, &p) in result.policy.powers().iter().enumerate() {
                s.push_str(&format!(
                    "{m},{p},{},{}\n",
                    ev.profile.eps()[m],
                    ev.steady_state.pi()[m]
                ));
            }
            s
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = result
                .policy
                .powers()
                .iter()
                .enumerate()
                .map(|(m, &p)| {
                    json!({
                        "state": m,
                        "power_w": p,
                        "eps": ev.profile.eps()[m],
                        "pi": ev.steady_state.pi()[m],
                    })
                })
                .collect();
            pretty(json!({
                "manifest": manifest_json(spec),
                "summary": {
                    "aoi": result.aoi,
                    "average_power_w": result.average_power,
                    "feasible_candidates": result.feasible_candidates,
                },
                "policy": rows,
            }))
        }
    }
}

/// Reads the per-state powers back from a policy file written by
/// [`render_policy`] (either format, detected by the first byte).
pub fn read_policy_powers(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading policy file {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        read_policy_json(&text)
    } else {
        read_policy_csv(&text)
    }
    .with_context(|| format!("parsing policy file {}", path.display()))
}

fn read_policy_json(text: &str) -> Result<Vec<f64>> {
    let value: Value = serde_json::from_str(text)?;
    let rows = value
        .get("policy")
        .and_then(Value::as_array)
        .context("no policy array")?;
    let mut powers = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let state = row
            .get("state")
            .and_then(Value::as_u64)
            .context("missing state")?;
        if state != i as u64 {
            bail!("policy rows out of order: expected state {i}, got {state}");
        }
        powers.push(
            row.get("power_w")
                .and_then(Value::as_f64)
                .context("missing power_w")?,
        );
    }
    Ok(powers)
}

fn read_policy_csv(text: &str) -> Result<Vec<f64>> {
    let mut lines = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header = lines.next().context("empty policy file")?;
    let columns: Vec<&str> = header.split(',').collect();
    let state_col = columns
        .iter()
        .position(|&c| c == "state")
        .context("no state column")?;
    let power_col = columns
        .iter()
        .position(|&c| c == "power_w")
        .context("no power_w column")?;
    let mut powers = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let state: usize = fields
            .get(state_col)
            .context("short row")?
            .parse()
            .context("bad state value")?;
        if state != i {
            bail!("policy rows out of order: expected state {i}, got {state}");
        }
        powers.push(
            fields
                .get(power_col)
                .context("short row")?
                .parse()
                .context("bad power value")?,
        );
    }
    Ok(powers)
}

// --- sweep tables ------------------------------------------------------------

#[derive(Debug, Default)]
pub struct SweepRow {
    pub pbar_dbw: f64,
    pub aoi_const: Option<f64>,
    pub aoi_onoff: Option<f64>,
    pub aoi_sa: Option<f64>,
    pub aoi_sim_sa: Option<f64>,
    pub ci_halfwidth: Option<f64>,
    pub error: Option<String>,
}

pub fn render_sweep(spec: &ResolvedSpec, rows: &[SweepRow]) -> String {
    match spec.format {
        OutputFormat::Csv => {
            let mut s = manifest_comments(spec, &[]);
            if spec.simulate {
                s.push_str("pbar_dbw,aoi_const,aoi_onoff,aoi_sa,aoi_sim_sa,ci_halfwidth,error\n");
            } else {
                s.push_str("pbar_dbw,aoi_const,aoi_onoff,aoi_sa,error\n");
            }
            for row in rows {
                let err = row.error.as_deref().unwrap_or("");
                if spec.simulate {
                    s.push_str(&format!(
                        "{},{},{},{},{},{},{err}\n",
                        row.pbar_dbw,
                        cell(row.aoi_const),
                        cell(row.aoi_onoff),
                        cell(row.aoi_sa),
                        cell(row.aoi_sim_sa),
                        cell(row.ci_halfwidth),
                    ));
                } else {
                    s.push_str(&format!(
                        "{},{},{},{},{err}\n",
                        row.pbar_dbw,
                        cell(row.aoi_const),
                        cell(row.aoi_onoff),
                        cell(row.aoi_sa),
                    ));
                }
            }
            s
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    m.insert("pbar_dbw".into(), json!(row.pbar_dbw));
                    let mut put = |k: &str, v: Option<f64>| {
                        if let Some(x) = v {
                            m.insert(k.into(), json!(x));
                        }
                    };
                    put("aoi_const", row.aoi_const);
                    put("aoi_onoff", row.aoi_onoff);
                    put("aoi_sa", row.aoi_sa);
                    if spec.simulate {
                        put("aoi_sim_sa", row.aoi_sim_sa);
                        put("ci_halfwidth", row.ci_halfwidth);
                    }
                    if let Some(e) = &row.error {
                        m.insert("error".into(), json!(e));
                    }
                    Value::Object(m)
                })
                .collect();
            pretty(json!({
                "manifest": manifest_json(spec),
                "rows": rows,
            }))
        }
    }
}

fn pretty(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json rendering cannot fail");
    s.push('\n');
    s
}
