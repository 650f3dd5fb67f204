//! Speed-constrained, maximum-speed and speed-free trajectories, the
//! leg/speed-free decomposition and successive hover-and-fly (SHF) assembly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::quadrature;

/// Relative slack on the speed limit to absorb float division.
pub const SPEED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrajectoryError {
    #[error("invalid breakpoints: {0}")]
    InvalidBreakpoints(String),
    #[error("trajectory moves backwards at t = {t}")]
    NotUnidirectional { t: f64 },
    #[error("segment speed {speed} exceeds the limit {v_max}")]
    SpeedViolation { speed: f64, v_max: f64 },
    #[error("horizon {horizon} s is shorter than the flight time {flight_time} s")]
    InfeasibleHorizon { flight_time: f64, horizon: f64 },
    #[error("durations sum to {actual} s but {expected} s are required")]
    DurationMismatch { expected: f64, actual: f64 },
    #[error("invalid hover set: {0}")]
    InvalidHover(String),
}

fn duration_tol(horizon: f64) -> f64 {
    1e-9 * horizon.abs().max(1.0)
}

/// Straight segment traversed at constant speed; `x_from == x_to` is a hover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearPiece {
    pub duration: f64,
    pub x_from: f64,
    pub x_to: f64,
}

impl LinearPiece {
    pub fn position(&self, t: f64) -> f64 {
        if self.duration <= 0.0 {
            return self.x_to;
        }
        self.x_from + (self.x_to - self.x_from) * (t / self.duration)
    }
}

/// Anything that can be expressed as a sequence of linear pieces.
pub trait Occupation {
    fn pieces(&self) -> Vec<LinearPiece>;
}

/// Time integral of `f(x(t))` over a sequence of pieces, Simpson on each
/// moving piece.
pub fn integrate_pieces<F>(pieces: &[LinearPiece], mut f: F, panels: usize) -> f64
where
    F: FnMut(f64) -> f64,
{
    pieces
        .iter()
        .map(|p| {
            if p.duration <= 0.0 {
                0.0
            } else if p.x_from == p.x_to {
                p.duration * f(p.x_from)
            } else {
                quadrature(|t| f(p.position(t)), 0.0, p.duration, panels)
            }
        })
        .sum()
}

/// Flight from `x_start` to `x_end` at constant speed `v_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxSpeedLeg {
    pub x_start: f64,
    pub x_end: f64,
    pub v_max: f64,
    pub duration: f64,
}

impl MaxSpeedLeg {
    pub fn new(x_start: f64, x_end: f64, v_max: f64) -> Result<Self, TrajectoryError> {
        if !(x_start <= x_end) {
            return Err(TrajectoryError::NotUnidirectional { t: 0.0 });
        }
        if !(v_max >= 0.0) {
            return Err(TrajectoryError::SpeedViolation { speed: x_end - x_start, v_max });
        }
        let duration = if x_end == x_start {
            0.0
        } else if v_max == 0.0 {
            return Err(TrajectoryError::SpeedViolation { speed: f64::INFINITY, v_max });
        } else {
            (x_end - x_start) / v_max
        };
        Ok(Self { x_start, x_end, v_max, duration })
    }

    pub fn position(&self, t: f64) -> f64 {
        (self.x_start + self.v_max * t).min(self.x_end)
    }
}

impl Occupation for MaxSpeedLeg {
    fn pieces(&self) -> Vec<LinearPiece> {
        if self.duration > 0.0 {
            vec![LinearPiece { duration: self.duration, x_from: self.x_start, x_to: self.x_end }]
        } else {
            Vec::new()
        }
    }
}

/// Hover points visited by a speed-free UAV together with dwell times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedFreeSchedule {
    pub hover_points: Vec<f64>,
    pub hover_durations: Vec<f64>,
    pub total: f64,
}

impl SpeedFreeSchedule {
    pub fn new(hover_points: Vec<f64>, hover_durations: Vec<f64>) -> Result<Self, TrajectoryError> {
        if hover_points.len() != hover_durations.len() {
            return Err(TrajectoryError::InvalidHover("points and durations differ in length".into()));
        }
        if hover_points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(TrajectoryError::InvalidHover("hover points must be strictly increasing".into()));
        }
        if hover_durations.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(TrajectoryError::InvalidHover("durations must be finite and >= 0".into()));
        }
        let total = hover_durations.iter().sum();
        Ok(Self { hover_points, hover_durations, total })
    }

    pub fn empty() -> Self {
        Self { hover_points: Vec::new(), hover_durations: Vec::new(), total: 0.0 }
    }
}

impl Occupation for SpeedFreeSchedule {
    fn pieces(&self) -> Vec<LinearPiece> {
        self.hover_points
            .iter()
            .zip(&self.hover_durations)
            .filter(|(_, d)| **d > 0.0)
            .map(|(&x, &d)| LinearPiece { duration: d, x_from: x, x_to: x })
            .collect()
    }
}

/// The speed-free part of a decomposed trajectory: pieces may be traversed at
/// any speed, and consecutive pieces need not connect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedFreeTrajectory {
    pub pieces: Vec<LinearPiece>,
}

impl SpeedFreeTrajectory {
    pub fn total(&self) -> f64 {
        self.pieces.iter().map(|p| p.duration).sum()
    }
}

impl Occupation for SpeedFreeTrajectory {
    fn pieces(&self) -> Vec<LinearPiece> {
        self.pieces.clone()
    }
}

/// Continuous trajectory through `(time, position)` breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinearTrajectory {
    pub breakpoints: Vec<(f64, f64)>,
}

impl PiecewiseLinearTrajectory {
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self, TrajectoryError> {
        if breakpoints.len() < 2 {
            return Err(TrajectoryError::InvalidBreakpoints("need at least two breakpoints".into()));
        }
        if breakpoints[0].0 != 0.0 {
            return Err(TrajectoryError::InvalidBreakpoints("first breakpoint must be at t = 0".into()));
        }
        if breakpoints.iter().any(|(t, x)| !t.is_finite() || !x.is_finite()) {
            return Err(TrajectoryError::InvalidBreakpoints("non-finite breakpoint".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(TrajectoryError::InvalidBreakpoints("times must be strictly increasing".into()));
        }
        Ok(Self { breakpoints })
    }

    pub fn horizon(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1].0
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0].1
    }

    pub fn end(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1].1
    }

    pub fn position(&self, t: f64) -> f64 {
        let bp = &self.breakpoints;
        if t <= 0.0 {
            return bp[0].1;
        }
        let i = bp.partition_point(|(ti, _)| *ti <= t);
        if i >= bp.len() {
            return bp[bp.len() - 1].1;
        }
        let (t0, x0) = bp[i - 1];
        let (t1, x1) = bp[i];
        x0 + (x1 - x0) * (t - t0) / (t1 - t0)
    }

    /// Segment speeds, signed.
    pub fn speeds(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect()
    }

    pub fn max_speed(&self) -> f64 {
        self.speeds().into_iter().map(f64::abs).fold(0.0, f64::max)
    }

    pub fn check_speed(&self, v_max: f64) -> Result<(), TrajectoryError> {
        let speed = self.max_speed();
        if speed > v_max * (1.0 + SPEED_TOL) {
            return Err(TrajectoryError::SpeedViolation { speed, v_max });
        }
        Ok(())
    }

    pub fn check_unidirectional(&self) -> Result<(), TrajectoryError> {
        for w in self.breakpoints.windows(2) {
            if w[1].1 < w[0].1 {
                return Err(TrajectoryError::NotUnidirectional { t: w[0].0 });
            }
        }
        Ok(())
    }

    /// Samples `(t, x)` every `step` seconds, always including the horizon.
    pub fn sample(&self, step: f64) -> Vec<(f64, f64)> {
        let horizon = self.horizon();
        let n = (horizon / step - 1e-9).ceil().max(1.0) as usize;
        (0..=n)
            .map(|i| {
                let t = if i == n { horizon } else { step * i as f64 };
                (t, self.position(t))
            })
            .collect()
    }

    /// Same path with extra breakpoints at every multiple of `horizon / n`.
    pub fn refined(&self, n: usize) -> Self {
        let horizon = self.horizon();
        let mut times: Vec<f64> = self.breakpoints.iter().map(|b| b.0).collect();
        for i in 1..n {
            times.push(horizon * i as f64 / n as f64);
        }
        times.sort_by(f64::total_cmp);
        times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * horizon.max(1.0));
        let breakpoints = times.iter().map(|&t| (t, self.position(t))).collect();
        Self { breakpoints }
    }
}

impl Occupation for PiecewiseLinearTrajectory {
    fn pieces(&self) -> Vec<LinearPiece> {
        self.breakpoints
            .windows(2)
            .map(|w| LinearPiece { duration: w[1].0 - w[0].0, x_from: w[0].1, x_to: w[1].1 })
            .collect()
    }
}

/// Split a unidirectional speed-feasible trajectory into a maximum-speed leg
/// and a speed-free remainder with the same occupation measure. Every segment
/// is treated as one sub-period.
pub fn decompose(
    traj: &PiecewiseLinearTrajectory,
    v_max: f64,
) -> Result<(MaxSpeedLeg, SpeedFreeTrajectory), TrajectoryError> {
    traj.check_unidirectional()?;
    traj.check_speed(v_max)?;
    let leg = MaxSpeedLeg::new(traj.start(), traj.end(), v_max)?;
    let mut pieces = Vec::new();
    for w in traj.breakpoints.windows(2) {
        let (t0, x0) = w[0];
        let (t1, x1) = w[1];
        let delta = t1 - t0;
        let leg_share = if x1 == x0 { 0.0 } else { (x1 - x0) / v_max };
        let rest = delta - leg_share;
        if rest > 0.0 {
            pieces.push(LinearPiece { duration: rest, x_from: x0, x_to: x1 });
        }
    }
    Ok((leg, SpeedFreeTrajectory { pieces }))
}

/// [`decompose`] after splitting the horizon into `n_subperiods` equal parts
/// (on top of the trajectory's own breakpoints).
pub fn decompose_with_subperiods(
    traj: &PiecewiseLinearTrajectory,
    v_max: f64,
    n_subperiods: usize,
) -> Result<(MaxSpeedLeg, SpeedFreeTrajectory), TrajectoryError> {
    decompose(&traj.refined(n_subperiods.max(1)), v_max)
}

/// Seconds spent in each position bin `[i w, (i+1) w)`, covering the visited
/// range; bins are keyed by their left edge.
pub fn occupation_histogram(traj: &impl Occupation, bin_width: f64) -> Vec<(f64, f64)> {
    histogram_of_pieces(&traj.pieces(), bin_width)
}

pub fn histogram_of_pieces(pieces: &[LinearPiece], bin_width: f64) -> Vec<(f64, f64)> {
    let mut bins: BTreeMap<i64, f64> = BTreeMap::new();
    let bin_of = |x: f64| (x / bin_width).floor() as i64;
    for p in pieces.iter().filter(|p| p.duration > 0.0) {
        let lo = p.x_from.min(p.x_to);
        let hi = p.x_from.max(p.x_to);
        if hi == lo {
            *bins.entry(bin_of(lo)).or_insert(0.0) += p.duration;
            continue;
        }
        let rate = p.duration / (hi - lo);
        for b in bin_of(lo)..=bin_of(hi) {
            let left = (b as f64 * bin_width).max(lo);
            let right = ((b + 1) as f64 * bin_width).min(hi);
            if right > left {
                *bins.entry(b).or_insert(0.0) += rate * (right - left);
            }
        }
    }
    let (Some(&first), Some(&last)) = (bins.keys().next(), bins.keys().next_back()) else {
        return Vec::new();
    };
    (first..=last).map(|b| (b as f64 * bin_width, bins.get(&b).copied().unwrap_or(0.0))).collect()
}

/// Phase of an SHF trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PhaseKind {
    /// Hovering at the hover point with this index.
    Hover { index: usize, x: f64 },
    Flight { x_from: f64, x_to: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Phase {
    pub t_start: f64,
    pub t_end: f64,
    pub kind: PhaseKind,
}

/// Fly at full speed from `x_initial` to `x_final`, pausing at each hover point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShfTrajectory {
    pub x_initial: f64,
    pub x_final: f64,
    pub hover_points: Vec<f64>,
    pub hover_durations: Vec<f64>,
    pub v_max: f64,
    pub horizon: f64,
}

pub fn assemble_shf(
    x_i: f64,
    x_f: f64,
    hover_points: Vec<f64>,
    hover_durations: Vec<f64>,
    v_max: f64,
    horizon: f64,
) -> Result<ShfTrajectory, TrajectoryError> {
    let leg = MaxSpeedLeg::new(x_i, x_f, v_max)?;
    if !(horizon > 0.0) || horizon + duration_tol(horizon) < leg.duration {
        return Err(TrajectoryError::InfeasibleHorizon { flight_time: leg.duration, horizon });
    }
    if hover_points.len() != hover_durations.len() {
        return Err(TrajectoryError::InvalidHover("points and durations differ in length".into()));
    }
    if hover_points.windows(2).any(|w| w[1] < w[0]) {
        return Err(TrajectoryError::InvalidHover("hover points must be sorted".into()));
    }
    if hover_points.iter().any(|&p| p < x_i || p > x_f) {
        return Err(TrajectoryError::InvalidHover("hover point outside [x_i, x_f]".into()));
    }
    if hover_durations.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
        return Err(TrajectoryError::InvalidHover("durations must be finite and >= 0".into()));
    }
    let actual = leg.duration + hover_durations.iter().sum::<f64>();
    if (actual - horizon).abs() > duration_tol(horizon) {
        return Err(TrajectoryError::DurationMismatch { expected: horizon, actual });
    }
    Ok(ShfTrajectory { x_initial: x_i, x_final: x_f, hover_points, hover_durations, v_max, horizon })
}

impl ShfTrajectory {
    pub fn leg(&self) -> MaxSpeedLeg {
        MaxSpeedLeg::new(self.x_initial, self.x_final, self.v_max).expect("validated at assembly")
    }

    pub fn flight_time(&self) -> f64 {
        self.leg().duration
    }

    /// Hover part as a speed-free schedule (coincident points merged).
    pub fn speed_free(&self) -> SpeedFreeSchedule {
        let mut points: Vec<f64> = Vec::new();
        let mut durations: Vec<f64> = Vec::new();
        for (&p, &d) in self.hover_points.iter().zip(&self.hover_durations) {
            if points.last() == Some(&p) {
                *durations.last_mut().expect("non-empty") += d;
            } else {
                points.push(p);
                durations.push(d);
            }
        }
        let total = durations.iter().sum();
        SpeedFreeSchedule { hover_points: points, hover_durations: durations, total }
    }

    /// Hover points with positive dwell time.
    pub fn active_hovers(&self, min_duration: f64) -> Vec<(f64, f64)> {
        self.hover_points
            .iter()
            .zip(&self.hover_durations)
            .filter(|(_, d)| **d > min_duration)
            .map(|(&p, &d)| (p, d))
            .collect()
    }

    /// Chronological hover and flight phases; zero-length phases are dropped.
    pub fn phases(&self) -> Vec<Phase> {
        let mut out = Vec::new();
        let mut t = 0.0;
        let mut cur = self.x_initial;
        let fly_to = |out: &mut Vec<Phase>, t: &mut f64, cur: &mut f64, x: f64| {
            if x > *cur {
                let dt = (x - *cur) / self.v_max;
                out.push(Phase { t_start: *t, t_end: *t + dt, kind: PhaseKind::Flight { x_from: *cur, x_to: x } });
                *t += dt;
                *cur = x;
            }
        };
        for (index, (&p, &d)) in self.hover_points.iter().zip(&self.hover_durations).enumerate() {
            if d <= 0.0 {
                continue;
            }
            fly_to(&mut out, &mut t, &mut cur, p);
            out.push(Phase { t_start: t, t_end: t + d, kind: PhaseKind::Hover { index, x: p } });
            t += d;
        }
        fly_to(&mut out, &mut t, &mut cur, self.x_final);
        if let Some(last) = out.last_mut() {
            last.t_end = self.horizon;
        }
        out
    }

    /// Piecewise-linear form; every segment has speed 0 or `v_max`.
    pub fn to_piecewise(&self) -> PiecewiseLinearTrajectory {
        let mut bps: Vec<(f64, f64)> = vec![(0.0, self.x_initial)];
        for ph in self.phases() {
            let x_end = match ph.kind {
                PhaseKind::Hover { x, .. } => x,
                PhaseKind::Flight { x_to, .. } => x_to,
            };
            bps.push((ph.t_end, x_end));
        }
        if bps.len() == 1 {
            bps.push((self.horizon, self.x_initial));
        }
        PiecewiseLinearTrajectory { breakpoints: bps }
    }

    /// Inverse of [`ShfTrajectory::to_piecewise`].
    pub fn from_piecewise(traj: &PiecewiseLinearTrajectory, v_max: f64) -> Result<Self, TrajectoryError> {
        traj.check_unidirectional()?;
        traj.check_speed(v_max)?;
        let mut points = Vec::new();
        let mut durations = Vec::new();
        let mut last_hover = false;
        for w in traj.breakpoints.windows(2) {
            let (t0, x0) = w[0];
            let (t1, x1) = w[1];
            if x1 == x0 {
                if last_hover {
                    *durations.last_mut().expect("hover recorded") += t1 - t0;
                } else {
                    points.push(x0);
                    durations.push(t1 - t0);
                }
                last_hover = true;
            } else {
                let speed = (x1 - x0) / (t1 - t0);
                if (speed - v_max).abs() > v_max * 1e-6 {
                    return Err(TrajectoryError::InvalidBreakpoints(format!(
                        "segment at t = {t0} flies at {speed}, neither 0 nor v_max"
                    )));
                }
                last_hover = false;
            }
        }
        assemble_shf(traj.start(), traj.end(), points, durations, v_max, traj.horizon())
    }
}

impl Occupation for ShfTrajectory {
    fn pieces(&self) -> Vec<LinearPiece> {
        self.to_piecewise().pieces()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leg_of_pure_hover() {
        let leg = MaxSpeedLeg::new(5.0, 5.0, 0.0).unwrap();
        assert_eq!(leg.duration, 0.0);
        assert!(MaxSpeedLeg::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn zero_duration_hover_is_dropped() {
        let shf = assemble_shf(0.0, 400.0, vec![100.0, 300.0], vec![0.0, 10.0], 20.0, 30.0).unwrap();
        let pw = shf.to_piecewise();
        assert_eq!(pw.breakpoints, vec![(0.0, 0.0), (15.0, 300.0), (25.0, 300.0), (30.0, 400.0)]);
    }

    #[test]
    fn rejects_short_horizon() {
        assert!(matches!(
            assemble_shf(0.0, 800.0, vec![], vec![], 20.0, 30.0),
            Err(TrajectoryError::InfeasibleHorizon { .. })
        ));
    }
}
