//! TOML scenario files.
//!
//! Quantities are plain numbers in base units (W, m, s, linear ratios) or
//! strings with a unit suffix: `"-30 dB"`, `"-100 dBm"`, `"30 dBm"`,
//! `"250 m"`, `"0.25 km"`, `"20 m/s"`, `"100 s"`, `"1 W"`, `"10 mW"`.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;
use uavmac::channel::{ChannelParams, UserLayout};
use uavmac::experiments::OracleGrid;
use uavmac::scenario::{DEFAULT_ALTITUDE, DEFAULT_HORIZON, DEFAULT_VMAX};
use uavmac::{RateProfile, Scenario, Scheme, SolverSettings};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.to_string(), message: message.into() }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Quantity {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Dimension {
    /// Linear power ratio; accepts dB.
    Ratio,
    /// Power in watts; accepts dBm, dBW, mW.
    Power,
    Length,
    Time,
    Speed,
}

impl Quantity {
    fn resolve(&self, field: &str, dim: Dimension) -> Result<f64, ConfigError> {
        let text = match self {
            Quantity::Number(v) => return Ok(*v),
            Quantity::Text(t) => t.trim(),
        };
        let split = text.find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E').unwrap_or(text.len());
        let (num, unit) = text.split_at(split);
        let value: f64 = num
            .trim()
            .parse()
            .map_err(|_| invalid(field, format!("cannot read a number from {text:?}")))?;
        let unit = unit.trim();
        let out = match (dim, unit) {
            (_, "") => value,
            (Dimension::Ratio, "dB") => 10f64.powf(value / 10.0),
            (Dimension::Power, "W") => value,
            (Dimension::Power, "mW") => value * 1e-3,
            (Dimension::Power, "dBW") => 10f64.powf(value / 10.0),
            (Dimension::Power, "dBm") => 10f64.powf((value - 30.0) / 10.0),
            (Dimension::Length, "m") => value,
            (Dimension::Length, "km") => value * 1e3,
            (Dimension::Time, "s") => value,
            (Dimension::Time, "min") => value * 60.0,
            (Dimension::Speed, "m/s") => value,
            (Dimension::Speed, "km/h") => value / 3.6,
            _ => return Err(invalid(field, format!("unit {unit:?} does not fit a {dim:?} quantity"))),
        };
        if !out.is_finite() {
            return Err(invalid(field, format!("{text:?} is not finite")));
        }
        Ok(out)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    layout: RawLayout,
    #[serde(default)]
    channel: RawChannel,
    #[serde(default)]
    uav: RawUav,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    profiles: RawProfiles,
    #[serde(default)]
    oracle: RawOracle,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayout {
    positions: Option<Vec<Quantity>>,
    /// Users at `spacing * k`, `k = 0..count`, when `positions` is absent.
    count: Option<usize>,
    spacing: Option<Quantity>,
    altitude: Option<Quantity>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    beta0: Option<Quantity>,
    epsilon: Option<f64>,
    xi: Option<f64>,
    c_env: Option<f64>,
    d_env: Option<f64>,
    noise_power: Option<Quantity>,
    tx_power: Option<Quantity>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUav {
    v_max: Option<Quantity>,
    horizon: Option<Quantity>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    scheme: Option<String>,
    endpoint_grid: Option<usize>,
    endpoint_refine: Option<bool>,
    user_endpoints: Option<bool>,
    hover_divisions: Option<usize>,
    leg_panels: Option<usize>,
    near_tie_tol: Option<f64>,
    order_tie_tol: Option<f64>,
    all_permutations: Option<bool>,
    ellipsoid_tolerance: Option<f64>,
    ellipsoid_feasibility_tol: Option<f64>,
    ellipsoid_iteration_factor: Option<usize>,
    polish_tol: Option<f64>,
    max_polish_iterations: Option<usize>,
    gap_tol: Option<f64>,
    static_divisions: Option<usize>,
    nesting_tol: Option<f64>,
    validation_tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfiles {
    /// `"equal"`, `"two-user-sweep"` or `"equal-and-axes"`.
    preset: Option<String>,
    alpha: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracle {
    endpoint_points: Option<usize>,
    subdivisions: Option<usize>,
    time_points: Option<usize>,
    theta_points: Option<usize>,
    refine: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    /// Sampling step of the trajectory and schedule CSVs, in seconds.
    sample_step: Option<Quantity>,
}

/// A validated scenario file with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub settings: SolverSettings,
    pub scheme: Option<Scheme>,
    pub profiles: Vec<RateProfile>,
    pub oracle: OracleGrid,
    pub output_dir: PathBuf,
    pub sample_step: f64,
    /// Slack of the `TDMA <= FDMA <= NOMA` check.
    pub nesting_tol: f64,
    /// Largest accepted gap between a reported rate and its re-evaluation.
    pub validation_tol: f64,
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;

    let altitude = match &raw.layout.altitude {
        Some(q) => q.resolve("layout.altitude", Dimension::Length)?,
        None => DEFAULT_ALTITUDE,
    };
    let positions = match (&raw.layout.positions, raw.layout.count) {
        (Some(p), _) => p
            .iter()
            .enumerate()
            .map(|(i, q)| q.resolve(&format!("layout.positions[{i}]"), Dimension::Length))
            .collect::<Result<Vec<_>, _>>()?,
        (None, Some(count)) => {
            let spacing = raw
                .layout
                .spacing
                .as_ref()
                .ok_or_else(|| invalid("layout.spacing", "required with layout.count"))?
                .resolve("layout.spacing", Dimension::Length)?;
            UserLayout::uniform(count, spacing, altitude).positions
        }
        (None, None) => return Err(invalid("layout.positions", "positions required")),
    };
    if positions.len() < 2 {
        return Err(invalid("layout.positions", "at least two users required"));
    }
    let layout = UserLayout::new(positions, altitude).map_err(|e| invalid("layout", e.to_string()))?;

    let d = ChannelParams::default();
    let c = &raw.channel;
    let channel = ChannelParams {
        beta0: opt(&c.beta0, "channel.beta0", Dimension::Ratio, d.beta0)?,
        epsilon: c.epsilon.unwrap_or(d.epsilon),
        xi: c.xi.unwrap_or(d.xi),
        c_env: c.c_env.unwrap_or(d.c_env),
        d_env: c.d_env.unwrap_or(d.d_env),
        noise_power: opt(&c.noise_power, "channel.noise_power", Dimension::Power, d.noise_power)?,
        tx_power: opt(&c.tx_power, "channel.tx_power", Dimension::Power, d.tx_power)?,
    };
    channel.validate().map_err(|e| invalid("channel", e.to_string()))?;

    let v_max = opt(&raw.uav.v_max, "uav.v_max", Dimension::Speed, DEFAULT_VMAX)?;
    let horizon = opt(&raw.uav.horizon, "uav.horizon", Dimension::Time, DEFAULT_HORIZON)?;
    let scenario = Scenario::new(layout, channel, v_max, horizon).map_err(|e| invalid("uav", e.to_string()))?;

    let s = &raw.solver;
    let base = SolverSettings::default();
    let settings = SolverSettings {
        endpoint_grid: s.endpoint_grid.unwrap_or(base.endpoint_grid),
        endpoint_refine: s.endpoint_refine.unwrap_or(base.endpoint_refine),
        user_endpoints: s.user_endpoints.unwrap_or(base.user_endpoints),
        hover_divisions: s.hover_divisions.unwrap_or(base.hover_divisions),
        leg_panels: s.leg_panels.unwrap_or(base.leg_panels),
        near_tie_tol: s.near_tie_tol.unwrap_or(base.near_tie_tol),
        order_tie_tol: s.order_tie_tol.unwrap_or(base.order_tie_tol),
        all_permutations: s.all_permutations.unwrap_or(base.all_permutations),
        ellipsoid_tolerance: s.ellipsoid_tolerance.unwrap_or(base.ellipsoid_tolerance),
        ellipsoid_feasibility_tol: s.ellipsoid_feasibility_tol.unwrap_or(base.ellipsoid_feasibility_tol),
        ellipsoid_iteration_factor: s.ellipsoid_iteration_factor.unwrap_or(base.ellipsoid_iteration_factor),
        polish_tol: s.polish_tol.unwrap_or(base.polish_tol),
        max_polish_iterations: s.max_polish_iterations.unwrap_or(base.max_polish_iterations),
        gap_tol: s.gap_tol.unwrap_or(base.gap_tol),
        static_divisions: s.static_divisions.unwrap_or(base.static_divisions),
    };
    settings.validate().map_err(|e| invalid("solver", e.to_string()))?;
    let scheme = s
        .scheme
        .as_deref()
        .map(|v| v.parse::<Scheme>().map_err(|e| invalid("solver.scheme", e.to_string())))
        .transpose()?;
    let nesting_tol = positive(s.nesting_tol, "solver.nesting_tol", 1e-6)?;
    let validation_tol = positive(s.validation_tol, "solver.validation_tol", 1e-6)?;

    let k = scenario.num_users();
    let profiles = match (&raw.profiles.alpha, raw.profiles.preset.as_deref()) {
        (Some(list), _) => list
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let field = format!("profiles.alpha[{i}]");
                if a.len() != k {
                    return Err(invalid(&field, format!("has {} entries for {k} users", a.len())));
                }
                RateProfile::new(a.clone()).map_err(|e| invalid(&field, e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?,
        (None, Some("equal")) => vec![RateProfile::uniform(k)],
        (None, Some("two-user-sweep")) if k == 2 => RateProfile::two_user_sweep(),
        (None, Some("two-user-sweep")) => return Err(invalid("profiles.preset", "two-user-sweep needs two users")),
        (None, Some("equal-and-axes")) => equal_and_axes(k),
        (None, Some(other)) => return Err(invalid("profiles.preset", format!("unknown preset {other:?}"))),
        (None, None) if k == 2 => RateProfile::two_user_sweep(),
        (None, None) => equal_and_axes(k),
    };

    let o = &raw.oracle;
    let og = OracleGrid::default();
    let oracle = OracleGrid {
        endpoint_points: o.endpoint_points.unwrap_or(og.endpoint_points),
        subdivisions: o.subdivisions.unwrap_or(og.subdivisions),
        time_points: o.time_points.unwrap_or(og.time_points),
        theta_points: o.theta_points.unwrap_or(og.theta_points),
        refine: o.refine.unwrap_or(og.refine),
    };
    if oracle.endpoint_points < 2 {
        return Err(invalid("oracle.endpoint_points", "must be >= 2"));
    }
    if oracle.subdivisions == 0 || !oracle.subdivisions.is_multiple_of(4) {
        return Err(invalid("oracle.subdivisions", "must be a positive multiple of 4"));
    }

    let output_dir = raw.output.dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    let sample_step = opt(&raw.output.sample_step, "output.sample_step", Dimension::Time, 1.0)?;
    if !(sample_step > 0.0) {
        return Err(invalid("output.sample_step", "must be > 0"));
    }

    Ok(ScenarioConfig {
        scenario,
        settings,
        scheme,
        profiles,
        oracle,
        output_dir,
        sample_step,
        nesting_tol,
        validation_tol,
    })
}

fn opt(q: &Option<Quantity>, field: &str, dim: Dimension, default: f64) -> Result<f64, ConfigError> {
    q.as_ref().map_or(Ok(default), |q| q.resolve(field, dim))
}

fn positive(v: Option<f64>, field: &str, default: f64) -> Result<f64, ConfigError> {
    let v = v.unwrap_or(default);
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(field, "must be > 0"))
    }
}

/// The equal profile followed by the `K` axis profiles.
fn equal_and_axes(k: usize) -> Vec<RateProfile> {
    let mut out = vec![RateProfile::uniform(k)];
    for i in 0..k {
        let mut a = vec![0.0; k];
        a[i] = 1.0;
        out.push(RateProfile::new(a).expect("unit vector"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decibel_units() {
        let q = Quantity::Text("-30 dB".into());
        assert!((q.resolve("x", Dimension::Ratio).unwrap() - 1e-3).abs() < 1e-18);
        let q = Quantity::Text("-100 dBm".into());
        assert!((q.resolve("x", Dimension::Power).unwrap() - 1e-13).abs() < 1e-28);
        let q = Quantity::Text("30dBm".into());
        assert!((q.resolve("x", Dimension::Power).unwrap() - 1.0).abs() < 1e-15);
        let q = Quantity::Text("2.5e2 m".into());
        assert_eq!(q.resolve("x", Dimension::Length).unwrap(), 250.0);
    }

    #[test]
    fn wrong_unit_names_the_field() {
        let q = Quantity::Text("20 dBm".into());
        let err = q.resolve("uav.v_max", Dimension::Speed).unwrap_err().to_string();
        assert!(err.starts_with("uav.v_max:"), "{err}");
    }
}
