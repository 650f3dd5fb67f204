//! Problem instance, solver knobs and the small value types shared by the
//! three schemes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{channel_gain, ChannelParams, UserLayout};
use crate::error::{Error, Result};
use crate::numerics::EllipsoidSettings;

/// Default mission length used when none is configured.
pub const DEFAULT_HORIZON: f64 = 100.0;
pub const DEFAULT_ALTITUDE: f64 = 250.0;
pub const DEFAULT_VMAX: f64 = 20.0;

/// Users, channel, UAV speed limit and mission horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub layout: UserLayout,
    pub channel: ChannelParams,
    pub v_max: f64,
    pub horizon: f64,
}

impl Scenario {
    pub fn new(layout: UserLayout, channel: ChannelParams, v_max: f64, horizon: f64) -> Result<Self> {
        let s = Self { layout, channel, v_max, horizon };
        s.validate()?;
        Ok(s)
    }

    /// Simulation defaults (H = 250 m, V = 20 m/s, T = 100 s) for the given users.
    pub fn with_users(positions: Vec<f64>) -> Result<Self> {
        Self::new(
            UserLayout::new(positions, DEFAULT_ALTITUDE)?,
            ChannelParams::default(),
            DEFAULT_VMAX,
            DEFAULT_HORIZON,
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        self.channel.validate()?;
        if !(self.v_max >= 0.0 && self.v_max.is_finite()) {
            return Err(Error::InvalidInput("v_max must be finite and >= 0".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidInput("horizon must be finite and > 0".into()));
        }
        Ok(())
    }

    pub fn with_horizon(&self, horizon: f64) -> Self {
        Self { horizon, ..self.clone() }
    }

    pub fn with_v_max(&self, v_max: f64) -> Self {
        Self { v_max, ..self.clone() }
    }

    pub fn with_altitude(&self, altitude: f64) -> Self {
        let mut s = self.clone();
        s.layout.altitude = altitude;
        s
    }

    pub fn num_users(&self) -> usize {
        self.layout.len()
    }

    /// `[w_1, w_K]`.
    pub fn span(&self) -> (f64, f64) {
        (self.layout.first(), self.layout.last())
    }

    pub fn gain(&self, user: usize, x: f64) -> f64 {
        channel_gain(x, self.layout.positions[user], &self.layout, &self.channel)
    }

    /// Receive SNR `P h_k(x) / sigma^2` of user `user` with the UAV at `x`.
    pub fn snr(&self, user: usize, x: f64) -> f64 {
        self.channel.snr_scale() * self.gain(user, x)
    }

    pub fn snrs(&self, x: f64) -> Vec<f64> {
        (0..self.num_users()).map(|k| self.snr(k, x)).collect()
    }

    /// Full-band single-user rate in bps/Hz.
    pub fn rate(&self, user: usize, x: f64) -> f64 {
        self.snr(user, x).ln_1p() / std::f64::consts::LN_2
    }

    /// Time to fly from `x_i` to `x_f` at full speed (0 when they coincide).
    pub fn flight_time(&self, x_i: f64, x_f: f64) -> f64 {
        if x_f == x_i {
            0.0
        } else {
            (x_f - x_i).abs() / self.v_max
        }
    }

    pub fn is_reachable(&self, x_i: f64, x_f: f64) -> bool {
        x_i <= x_f && self.flight_time(x_i, x_f) <= self.horizon * (1.0 + 1e-12)
    }

    /// Users whose positions lie in `[x_i, x_f]`.
    pub fn users_between(&self, x_i: f64, x_f: f64) -> Vec<usize> {
        (0..self.num_users())
            .filter(|&k| {
                let w = self.layout.positions[k];
                w >= x_i && w <= x_f
            })
            .collect()
    }
}

/// Grid sizes and tolerances for the dual-decomposition solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    /// Points per axis of the endpoint grid over `[w_1, w_K]`.
    pub endpoint_grid: usize,
    /// Local refinement around the best endpoint cell at a quarter step.
    pub endpoint_refine: bool,
    /// Add the user positions to the endpoint grid.
    pub user_endpoints: bool,
    /// Hover-location grid step is `(x_F - x_I) / hover_divisions`.
    pub hover_divisions: usize,
    /// Simpson subintervals along the maximum-speed leg.
    pub leg_panels: usize,
    /// Weighted-rate slack (bps/Hz) for counting near-tie maximizers.
    pub near_tie_tol: f64,
    /// Relative slack for grouping tied dual weights.
    pub order_tie_tol: f64,
    /// Enumerate every permutation inside a tie group instead of rotations.
    pub all_permutations: bool,
    pub ellipsoid_tolerance: f64,
    pub ellipsoid_feasibility_tol: f64,
    pub ellipsoid_iteration_factor: usize,
    /// Target gap between dual bound and recovered primal value.
    pub polish_tol: f64,
    pub max_polish_iterations: usize,
    /// Reported-gap threshold above which a warning is logged.
    pub gap_tol: f64,
    /// Grid divisions for one-dimensional static-hover searches.
    pub static_divisions: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            endpoint_grid: 41,
            endpoint_refine: true,
            user_endpoints: true,
            hover_divisions: 400,
            leg_panels: 256,
            near_tie_tol: 1e-6,
            order_tie_tol: 1e-4,
            all_permutations: false,
            ellipsoid_tolerance: 1e-5,
            ellipsoid_feasibility_tol: 1e-6,
            ellipsoid_iteration_factor: 500,
            polish_tol: 1e-9,
            max_polish_iterations: 60,
            gap_tol: 1e-3,
            static_divisions: 400,
        }
    }
}

impl SolverSettings {
    pub fn ellipsoid(&self) -> EllipsoidSettings {
        EllipsoidSettings {
            tolerance: self.ellipsoid_tolerance,
            feasibility_tol: self.ellipsoid_feasibility_tol,
            iteration_factor: self.ellipsoid_iteration_factor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(format!("solver.{what}")));
        if self.endpoint_grid < 2 {
            return bad("endpoint_grid must be >= 2");
        }
        if self.hover_divisions == 0 || self.leg_panels == 0 || self.static_divisions == 0 {
            return bad("grid divisions must be >= 1");
        }
        for (name, v) in [
            ("near_tie_tol", self.near_tie_tol),
            ("order_tie_tol", self.order_tie_tol),
            ("ellipsoid_tolerance", self.ellipsoid_tolerance),
            ("ellipsoid_feasibility_tol", self.ellipsoid_feasibility_tol),
            ("polish_tol", self.polish_tol),
            ("gap_tol", self.gap_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(&format!("{name} must be > 0"));
            }
        }
        if self.ellipsoid_iteration_factor == 0 {
            return bad("ellipsoid_iteration_factor must be >= 1");
        }
        Ok(())
    }
}

/// Multiple-access scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Noma,
    Fdma,
    Tdma,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Noma, Scheme::Fdma, Scheme::Tdma];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Noma => "noma",
            Scheme::Fdma => "fdma",
            Scheme::Tdma => "tdma",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "noma" => Ok(Scheme::Noma),
            "fdma" => Ok(Scheme::Fdma),
            "tdma" => Ok(Scheme::Tdma),
            other => Err(Error::InvalidInput(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Target split `alpha` of the sum rate among users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RateProfile(Vec<f64>);

impl RateProfile {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidInput("rate profile is empty".into()));
        }
        if alpha.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::InvalidInput("rate profile entries must be finite and >= 0".into()));
        }
        let sum: f64 = alpha.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("rate profile sums to {sum}, not 1")));
        }
        Ok(Self(alpha))
    }

    /// Rescale nonnegative weights to sum to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::InvalidInput("rate profile weights sum to zero".into()));
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    /// `(a, 1 - a)`.
    pub fn two_user(a: f64) -> Result<Self> {
        Self::new(vec![a, 1.0 - a])
    }

    /// The 21 profiles `alpha_1 = 0, 0.05, ..., 1` for two users.
    pub fn two_user_sweep() -> Vec<Self> {
        (0..=20).map(|i| Self(vec![i as f64 / 20.0, 1.0 - i as f64 / 20.0])).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Average rates per user in bps/Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RateTuple(pub Vec<f64>);

impl RateTuple {
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Largest `R` with `r_k >= alpha_k R` for all users.
    pub fn profile_rate(&self, alpha: &RateProfile) -> f64 {
        self.0
            .iter()
            .zip(alpha.as_slice())
            .filter(|(_, a)| **a > 0.0)
            .map(|(r, a)| r / a)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Nonnegative multipliers of the rate-profile constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DualVector(pub Vec<f64>);

impl DualVector {
    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    /// Clip negatives and rescale so that `sum(weights * alpha) == 1`.
    pub fn normalized(weights: &[f64], alpha: &[f64]) -> Option<Self> {
        let clipped: Vec<f64> = weights.iter().map(|w| w.max(0.0)).collect();
        let s: f64 = clipped.iter().zip(alpha).map(|(w, a)| w * a).sum();
        if !(s > 0.0) || !s.is_finite() {
            return None;
        }
        Some(Self(clipped.into_iter().map(|w| w / s).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_validation() {
        assert!(RateProfile::new(vec![0.5, 0.5]).is_ok());
        assert!(RateProfile::new(vec![0.5, 0.6]).is_err());
        assert!(RateProfile::new(vec![-0.5, 1.5]).is_err());
        assert_eq!(RateProfile::two_user_sweep().len(), 21);
    }

    #[test]
    fn profile_rate_ignores_zero_weights() {
        let r = RateTuple(vec![3.0, 1.0]);
        assert_eq!(r.profile_rate(&RateProfile::new(vec![1.0, 0.0]).unwrap()), 3.0);
        assert_eq!(r.profile_rate(&RateProfile::uniform(2)), 2.0);
    }
}
