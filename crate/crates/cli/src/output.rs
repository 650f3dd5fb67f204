//! Files written by the CLI.
//!
//! Column contracts:
//! - `trajectory.csv`: `t,x`, the UAV position at every sample time and
//!   every phase boundary.
//! - `schedule.csv`: `t,<res>_1,...,<res>_K` at the same times. The resource
//!   is the bandwidth fraction `b_k` (FDMA), the time share `a_k` of user k
//!   (TDMA) or the time-shared SIC rate `r_k` in bps/Hz (NOMA). At a phase
//!   boundary the later phase is reported.
//! - `region_<scheme>.csv`: `alpha_1..alpha_K,r_1..r_K,R` per profile.
//!
//! Every float is written with 12 significant digits.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use uavmac::experiments::{RegionBoundary, Solution};
use uavmac::noma::instantaneous_vertex_rates;
use uavmac::trajectory::PhaseKind;
use uavmac::{RateProfile, Result, Scenario};

/// `v` rounded to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

pub fn fmt12(v: f64) -> String {
    let r = round12(v);
    if r == 0.0 {
        "0".to_string()
    } else {
        r.to_string()
    }
}

/// JSON tree of `value` with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Value {
    fn walk(v: Value) -> Value {
        match v {
            Value::Number(n) if n.is_f64() => {
                serde_json::Number::from_f64(round12(n.as_f64().expect("f64 number"))).map_or(Value::Null, Value::Number)
            }
            Value::Array(a) => Value::Array(a.into_iter().map(walk).collect()),
            Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, walk(v))).collect()),
            other => other,
        }
    }
    walk(serde_json::to_value(value).expect("output types serialize"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(&to_json(value)).expect("JSON values serialize");
    text.push('\n');
    fs::write(path, text)
}

pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<f64>]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| fmt12(*v)))?;
    }
    w.flush()
}

/// Sample times: multiples of `step` plus every phase boundary.
pub fn sample_times(sol: &Solution, step: f64) -> Vec<f64> {
    let shf = sol.trajectory();
    let n = (shf.horizon / step).floor() as usize;
    let mut ts: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
    for p in shf.phases() {
        ts.push(p.t_start);
        ts.push(p.t_end);
    }
    ts.push(shf.horizon);
    ts.retain(|t| *t <= shf.horizon);
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    ts
}

pub fn trajectory_rows(sol: &Solution, times: &[f64]) -> Vec<Vec<f64>> {
    let path = sol.trajectory().to_piecewise();
    times.iter().map(|&t| vec![t, path.position(t)]).collect()
}

/// Column prefix of the schedule CSV.
pub fn schedule_label(sol: &Solution) -> &'static str {
    match sol {
        Solution::Noma(_) => "r",
        Solution::Fdma(_) => "b",
        Solution::Tdma(_) => "a",
    }
}

pub fn schedule_rows(sol: &Solution, scn: &Scenario, times: &[f64]) -> Result<Vec<Vec<f64>>> {
    let k = scn.num_users();
    let shf = sol.trajectory();
    let phases = shf.phases();
    let path = shf.to_piecewise();
    let phase_at = |t: f64| {
        phases.iter().rev().find(|p| t >= p.t_start - 1e-12 && p.t_end > p.t_start).or(phases.last()).copied()
    };
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let mut row = vec![t];
        let values = match sol {
            Solution::Fdma(s) => {
                let mut b = vec![0.0; k];
                for (w, fr) in s.bandwidth_schedule(t, scn)? {
                    for (acc, f) in b.iter_mut().zip(fr) {
                        *acc += w * f;
                    }
                }
                b
            }
            Solution::Tdma(s) => s.shares_at(t),
            Solution::Noma(s) => {
                let x = path.position(t);
                let orders = &s.hover_set.decoding_orders;
                let mix: Vec<(usize, f64)> = match phase_at(t).map(|p| p.kind) {
                    Some(PhaseKind::Hover { index, .. }) => {
                        let entries: Vec<_> = s.hover_set.entries.iter().filter(|e| e.hover_index == index).collect();
                        let total: f64 = entries.iter().map(|e| e.weight).sum();
                        entries.iter().map(|e| (e.order_index, e.weight / total)).collect()
                    }
                    _ => s.flight_order_weights().into_iter().enumerate().collect(),
                };
                let mut r = vec![0.0; k];
                for (o, w) in mix {
                    if w > 0.0 {
                        for (acc, v) in r.iter_mut().zip(instantaneous_vertex_rates(&orders[o], x, scn)) {
                            *acc += w * v;
                        }
                    }
                }
                r
            }
        };
        row.extend(values);
        rows.push(row);
    }
    Ok(rows)
}

pub fn region_rows(boundary: &RegionBoundary) -> Vec<Vec<f64>> {
    boundary
        .points
        .iter()
        .map(|p| {
            let mut row = p.alpha.as_slice().to_vec();
            row.extend(&p.rates.0);
            row.push(p.rate);
            row
        })
        .collect()
}

pub fn region_header(k: usize) -> Vec<String> {
    let mut h: Vec<String> = (1..=k).map(|i| format!("alpha_{i}")).collect();
    h.extend((1..=k).map(|i| format!("r_{i}")));
    h.push("R".into());
    h
}

/// Summary plus the full solver output, as written to `solution.json`.
#[derive(Debug, Serialize)]
pub struct SolutionReport<'a> {
    pub scheme: String,
    pub alpha: &'a RateProfile,
    pub scenario: &'a Scenario,
    #[serde(rename = "R")]
    pub rate: f64,
    pub rates: &'a [f64],
    pub dual_value: f64,
    pub duality_gap: f64,
    pub x_initial: f64,
    pub x_final: f64,
    pub hover_points: &'a [f64],
    pub hover_durations: &'a [f64],
    pub hover_count: usize,
    /// Common rate re-evaluated from the emitted trajectory and schedule.
    pub validated_rate: f64,
    pub detail: &'a Solution,
}
