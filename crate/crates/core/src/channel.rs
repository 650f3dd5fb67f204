//! Probabilistic line-of-sight air-to-ground channel.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("{field}: {message}")]
    Invalid { field: &'static str, message: String },
}

fn invalid(field: &'static str, message: impl Into<String>) -> ChannelError {
    ChannelError::Invalid { field, message: message.into() }
}

/// Channel constants, all in linear units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Reference power gain at 1 m.
    pub beta0: f64,
    /// Path-loss exponent.
    pub epsilon: f64,
    /// Extra attenuation of NLoS links, in (0, 1).
    pub xi: f64,
    /// Logistic LoS parameter C.
    pub c_env: f64,
    /// Logistic LoS parameter D, per degree.
    pub d_env: f64,
    /// Receiver noise power in watts.
    pub noise_power: f64,
    /// Per-user transmit power in watts.
    pub tx_power: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            beta0: 1e-3,
            epsilon: 2.0,
            xi: 0.2,
            c_env: 10.0,
            d_env: 0.6,
            noise_power: 1e-13,
            tx_power: 1.0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.beta0) {
            return Err(invalid("beta0", "must be > 0"));
        }
        if !positive(self.epsilon) {
            return Err(invalid("epsilon", "must be > 0"));
        }
        if !(self.xi > 0.0 && self.xi < 1.0) {
            return Err(invalid("xi", "must lie in (0, 1)"));
        }
        if !self.c_env.is_finite() || !self.d_env.is_finite() {
            return Err(invalid("c_env/d_env", "must be finite"));
        }
        if !positive(self.noise_power) {
            return Err(invalid("noise_power", "must be > 0"));
        }
        if !positive(self.tx_power) {
            return Err(invalid("tx_power", "must be > 0"));
        }
        Ok(())
    }

    /// Transmit SNR scale P / sigma^2.
    pub fn snr_scale(&self) -> f64 {
        self.tx_power / self.noise_power
    }
}

/// Ground users on a line and the UAV altitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserLayout {
    pub positions: Vec<f64>,
    pub altitude: f64,
}

impl UserLayout {
    /// Accepts any number of users >= 1; configuration loading additionally
    /// requires two.
    pub fn new(positions: Vec<f64>, altitude: f64) -> Result<Self, ChannelError> {
        let layout = Self { positions, altitude };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.positions.is_empty() {
            return Err(invalid("positions", "at least one user required"));
        }
        if self.positions.iter().any(|w| !w.is_finite()) {
            return Err(invalid("positions", "must be finite"));
        }
        if self.positions.windows(2).any(|p| p[1] < p[0]) {
            return Err(invalid("positions", "must be nondecreasing"));
        }
        if !(self.altitude.is_finite() && self.altitude > 0.0) {
            return Err(invalid("altitude", "must be > 0"));
        }
        Ok(())
    }

    /// Users spaced `spacing` apart starting at 0.
    pub fn uniform(k: usize, spacing: f64, altitude: f64) -> Self {
        Self { positions: (0..k).map(|i| spacing * i as f64).collect(), altitude }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.positions[0]
    }

    pub fn last(&self) -> f64 {
        self.positions[self.positions.len() - 1]
    }
}

/// Elevation angle in degrees seen from a user at `user_w` to a UAV at
/// `uav_x` and altitude `h`.
pub fn elevation_angle(uav_x: f64, user_w: f64, h: f64) -> f64 {
    let dx = uav_x - user_w;
    if dx == 0.0 {
        return 90.0;
    }
    (h / dx.hypot(h)).asin().to_degrees()
}

pub fn los_probability(elev_deg: f64, params: &ChannelParams) -> f64 {
    1.0 / (1.0 + params.c_env * (-params.d_env * (elev_deg - params.c_env)).exp())
}

/// Average power gain at distance `distance` for a link that is LoS with
/// probability `p_los`.
pub fn mixed_gain(distance: f64, p_los: f64, params: &ChannelParams) -> f64 {
    (p_los + params.xi * (1.0 - p_los)) * params.beta0 * distance.powf(-params.epsilon)
}

pub fn channel_gain(uav_x: f64, user_w: f64, layout: &UserLayout, params: &ChannelParams) -> f64 {
    let h = layout.altitude;
    let distance = (uav_x - user_w).hypot(h);
    let p_los = los_probability(elevation_angle(uav_x, user_w, h), params);
    mixed_gain(distance, p_los, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overhead_and_diagonal() {
        assert_eq!(elevation_angle(0.0, 0.0, 250.0), 90.0);
        assert!((elevation_angle(250.0, 0.0, 250.0) - 45.0).abs() < 1e-12);
    }

    #[test]
    fn logistic_midpoint() {
        let p = ChannelParams::default();
        assert!((los_probability(10.0, &p) - 1.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn layout_rejects_unsorted() {
        assert!(UserLayout::new(vec![1.0, 0.0], 250.0).is_err());
        assert!(UserLayout::new(vec![0.0, 1.0], -5.0).is_err());
    }
}
