//! Pareto sweeps, the two hover benchmarks, the two-user brute-force oracle
//! and region-level checks built on the scheme solvers.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::dual::{timeshare, HoverSet, SolveDiagnostics};
use crate::error::{Error, Result};
use crate::fdma::{self, FdmaSolution};
use crate::noma::{self, enumerate_orders, instantaneous_vertex_rates, NomaSolution};
use crate::numerics::{uniform_grid, SimpsonRule};
use crate::scenario::{RateProfile, RateTuple, Scenario, Scheme, SolverSettings};
use crate::tdma::{self, TdmaSolution};
use crate::trajectory::{MaxSpeedLeg, ShfTrajectory};

/// Output of one of the three scheme solvers.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "scheme", content = "solution", rename_all = "lowercase")]
pub enum Solution {
    Noma(NomaSolution),
    Fdma(FdmaSolution),
    Tdma(TdmaSolution),
}

impl Solution {
    pub fn scheme(&self) -> Scheme {
        match self {
            Solution::Noma(_) => Scheme::Noma,
            Solution::Fdma(_) => Scheme::Fdma,
            Solution::Tdma(_) => Scheme::Tdma,
        }
    }

    pub fn rates(&self) -> &RateTuple {
        match self {
            Solution::Noma(s) => &s.rates,
            Solution::Fdma(s) => &s.rates,
            Solution::Tdma(s) => &s.rates,
        }
    }

    /// Achieved common rate `R`.
    pub fn sum_rate(&self) -> f64 {
        match self {
            Solution::Noma(s) => s.sum_rate,
            Solution::Fdma(s) => s.sum_rate,
            Solution::Tdma(s) => s.sum_rate,
        }
    }

    pub fn dual_value(&self) -> f64 {
        match self {
            Solution::Noma(s) => s.dual_value,
            Solution::Fdma(s) => s.dual_value,
            Solution::Tdma(s) => s.dual_value,
        }
    }

    pub fn duality_gap(&self) -> f64 {
        self.dual_value() - self.sum_rate()
    }

    pub fn hover_count(&self) -> usize {
        match self {
            Solution::Noma(s) => s.hover_count(),
            Solution::Fdma(s) => s.hover_count(),
            Solution::Tdma(s) => s.hover_count(),
        }
    }

    pub fn trajectory(&self) -> &ShfTrajectory {
        match self {
            Solution::Noma(s) => &s.shf,
            Solution::Fdma(s) => &s.shf,
            Solution::Tdma(s) => &s.shf,
        }
    }

    pub fn diagnostics(&self) -> &SolveDiagnostics {
        match self {
            Solution::Noma(s) => &s.diagnostics,
            Solution::Fdma(s) => &s.diagnostics,
            Solution::Tdma(s) => &s.diagnostics,
        }
    }

    /// Rates re-evaluated from the trajectory and resource schedule alone.
    pub fn recompute_rates(&self, scn: &Scenario, panels: usize) -> Result<RateTuple> {
        match self {
            Solution::Noma(s) => Ok(s.recompute_rates(scn, panels)),
            Solution::Fdma(s) => s.recompute_rates(scn, panels),
            Solution::Tdma(s) => Ok(s.recompute_rates(scn, panels)),
        }
    }
}

/// Solve the Pareto-boundary problem of `scheme` in direction `alpha`.
pub fn solve(scheme: Scheme, alpha: &RateProfile, scn: &Scenario, settings: &SolverSettings) -> Result<Solution> {
    Ok(match scheme {
        Scheme::Noma => Solution::Noma(noma::solve_p1(alpha, scn, settings)?),
        Scheme::Fdma => Solution::Fdma(fdma::solve_p2(alpha, scn, settings)?),
        Scheme::Tdma => Solution::Tdma(tdma::solve_p3(alpha, scn, settings)?),
    })
}

/// Rate every user gets under equal rate shares, `R / K`.
pub fn common_rate(scheme: Scheme, scn: &Scenario, settings: &SolverSettings) -> Result<f64> {
    let k = scn.num_users();
    Ok(solve(scheme, &RateProfile::uniform(k), scn, settings)?.sum_rate() / k as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub alpha: RateProfile,
    pub rates: RateTuple,
    pub rate: f64,
    pub dual_value: f64,
    pub hover_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepFailure {
    pub alpha: RateProfile,
    pub error: String,
}

/// Boundary points of one rate region, in profile order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionBoundary {
    pub label: String,
    pub points: Vec<BoundaryPoint>,
    pub failures: Vec<SweepFailure>,
}

impl RegionBoundary {
    pub fn rate_for(&self, alpha: &RateProfile) -> Option<f64> {
        self.points.iter().find(|p| &p.alpha == alpha).map(|p| p.rate)
    }
}

/// One boundary point per profile; failed profiles are recorded and skipped.
pub fn pareto_sweep(
    scheme: Scheme,
    profiles: &[RateProfile],
    scn: &Scenario,
    settings: &SolverSettings,
) -> RegionBoundary {
    let results: Vec<(RateProfile, Result<Solution>)> =
        profiles.par_iter().map(|a| (a.clone(), solve(scheme, a, scn, settings))).collect();
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (alpha, res) in results {
        match res {
            Ok(sol) => points.push(BoundaryPoint {
                alpha,
                rates: sol.rates().clone(),
                rate: sol.sum_rate(),
                dual_value: sol.dual_value(),
                hover_count: sol.hover_count(),
            }),
            Err(e) => {
                log::warn!("{scheme} profile {:?} failed: {e}", alpha.as_slice());
                failures.push(SweepFailure { alpha, error: e.to_string() });
            }
        }
    }
    RegionBoundary { label: scheme.to_string(), points, failures }
}

/// Largest amount by which a chord between two boundary points pokes outside
/// the boundary, measured along the profile rays it crosses. Nonpositive for
/// a convex two-user region.
pub fn chord_excess(boundary: &RegionBoundary) -> f64 {
    let pts = &boundary.points;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (p, q) = (&pts[i].rates.0, &pts[j].rates.0);
            if p.len() != 2 {
                continue;
            }
            for m in pts {
                let a = m.alpha.as_slice();
                // p + s (q - p) = a R
                let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
                let det = dx * a[1] - dy * a[0];
                if det.abs() < 1e-15 {
                    continue;
                }
                let s = (a[0] * p[1] - a[1] * p[0]) / det;
                if !(-1e-12..=1.0 + 1e-12).contains(&s) {
                    continue;
                }
                let r = if a[0] > a[1] { (p[0] + s * dx) / a[0] } else { (p[1] + s * dy) / a[1] };
                worst = worst.max(r - m.rate);
            }
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestingEntry {
    pub alpha: RateProfile,
    pub noma: f64,
    pub fdma: f64,
    pub tdma: f64,
    /// `R_FDMA - R_TDMA`.
    pub fdma_margin: f64,
    /// `R_NOMA - R_FDMA`.
    pub noma_margin: f64,
    pub ordered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestingReport {
    pub tolerance: f64,
    pub entries: Vec<NestingEntry>,
    pub failures: Vec<SweepFailure>,
    pub ordered: bool,
}

impl NestingReport {
    pub fn violations(&self) -> impl Iterator<Item = &NestingEntry> {
        self.entries.iter().filter(|e| !e.ordered)
    }
}

/// Checks `R_TDMA <= R_FDMA <= R_NOMA` per profile within `tolerance`.
pub fn region_nesting_report(
    profiles: &[RateProfile],
    scn: &Scenario,
    settings: &SolverSettings,
    tolerance: f64,
) -> NestingReport {
    let [n, f, t] = Scheme::ALL.map(|s| pareto_sweep(s, profiles, scn, settings));
    nesting_from_sweeps(&n, &f, &t, tolerance)
}

/// Nesting report from sweeps already computed over the same profiles.
pub fn nesting_from_sweeps(
    noma: &RegionBoundary,
    fdma: &RegionBoundary,
    tdma: &RegionBoundary,
    tolerance: f64,
) -> NestingReport {
    let mut entries = Vec::new();
    let mut failures: Vec<SweepFailure> =
        [noma, fdma, tdma].iter().flat_map(|b| b.failures.iter().cloned()).collect();
    for p in &noma.points {
        match (fdma.rate_for(&p.alpha), tdma.rate_for(&p.alpha)) {
            (Some(f), Some(t)) => {
                let ordered = t <= f + tolerance && f <= p.rate + tolerance;
                entries.push(NestingEntry {
                    alpha: p.alpha.clone(),
                    noma: p.rate,
                    fdma: f,
                    tdma: t,
                    fdma_margin: f - t,
                    noma_margin: p.rate - f,
                    ordered,
                });
            }
            _ => failures.push(SweepFailure {
                alpha: p.alpha.clone(),
                error: "missing FDMA or TDMA point".into(),
            }),
        }
    }
    let ordered = failures.is_empty() && entries.iter().all(|e| e.ordered);
    NestingReport { tolerance, entries, failures, ordered }
}

/// Rates, common rate and hover schedule of a benchmark trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkPoint {
    pub rates: RateTuple,
    pub rate: f64,
    pub hover_points: Vec<f64>,
    pub hover_durations: Vec<f64>,
}

/// Fly from the first to the last user, hovering above every user with
/// jointly optimized durations and resource allocation.
pub fn benchmark_successive_hover(
    scheme: Scheme,
    alpha: &RateProfile,
    scn: &Scenario,
    settings: &SolverSettings,
) -> Result<BenchmarkPoint> {
    check_profile(alpha, scn)?;
    settings.validate()?;
    let (lo, hi) = scn.span();
    if !scn.is_reachable(lo, hi) {
        return Err(Error::InfeasibleHorizon { flight_time: scn.flight_time(lo, hi), horizon: scn.horizon });
    }
    let from_shf = |rates: RateTuple, rate: f64, shf: &ShfTrajectory| BenchmarkPoint {
        rates,
        rate,
        hover_points: shf.hover_points.clone(),
        hover_durations: shf.hover_durations.clone(),
    };
    match scheme {
        Scheme::Noma => successive_noma(alpha, scn, settings),
        Scheme::Fdma => {
            let s = fdma::solve_fixed(lo, hi, alpha, scn, settings, HoverSet::Users)?;
            Ok(from_shf(s.rates, s.sum_rate, &s.shf))
        }
        Scheme::Tdma => {
            let s = tdma::solve_p3_fixed_endpoints(lo, hi, alpha, scn, settings)?;
            Ok(from_shf(s.rates, s.sum_rate, &s.shf))
        }
    }
}

/// Time-sharing LP over (user position, decoding order) columns, every
/// permutation included. The flight uses each order for the same share as
/// the hovering.
fn successive_noma(alpha: &RateProfile, scn: &Scenario, settings: &SolverSettings) -> Result<BenchmarkPoint> {
    let k = scn.num_users();
    let (lo, hi) = scn.span();
    let leg = MaxSpeedLeg::new(lo, hi, scn.v_max)?;
    let hover_time = (scn.horizon - leg.duration).max(0.0);
    let orders = enumerate_orders(&vec![1.0; k], 0.0, true);
    let rule = SimpsonRule::new(0.0, leg.duration, settings.leg_panels);
    let positions = &scn.layout.positions;
    let mut columns = Vec::new();
    let mut keys = Vec::new();
    for order in &orders {
        let mut flight = vec![0.0; k];
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            for (acc, v) in flight.iter_mut().zip(instantaneous_vertex_rates(order, leg.position(t), scn)) {
                *acc += w * v;
            }
        }
        for (user, &x) in positions.iter().enumerate() {
            let hover = instantaneous_vertex_rates(order, x, scn);
            columns.push((0..k).map(|u| (flight[u] + hover_time * hover[u]) / scn.horizon).collect::<Vec<f64>>());
            keys.push(user);
        }
    }
    let share = timeshare(&columns, &vec![0.0; k], alpha.as_slice())?;
    let mut durations = vec![0.0; k];
    for (&user, w) in keys.iter().zip(&share.weights) {
        durations[user] += w * hover_time;
    }
    Ok(BenchmarkPoint {
        rates: RateTuple(share.rates),
        rate: share.sum_rate,
        hover_points: positions.clone(),
        hover_durations: durations,
    })
}

/// Best single hover location and the rates obtained there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaticHover {
    pub x: f64,
    pub rates: RateTuple,
    pub rate: f64,
}

/// Hover at one location for the whole horizon; the location is searched
/// over the static grid of `[w_1, w_K]` plus the user positions.
pub fn benchmark_static_hover(
    scheme: Scheme,
    alpha: &RateProfile,
    scn: &Scenario,
    settings: &SolverSettings,
) -> Result<StaticHover> {
    check_profile(alpha, scn)?;
    settings.validate()?;
    let (lo, hi) = scn.span();
    let mut xs = if hi > lo { uniform_grid(lo, hi, (hi - lo) / settings.static_divisions as f64) } else { vec![lo] };
    xs.extend(scn.layout.positions.iter().copied());
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    let a = alpha.as_slice();
    let values: Vec<f64> = xs.par_iter().map(|&x| static_rate(scheme, a, &scn.snrs(x))).collect();
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    let rate = values[best];
    Ok(StaticHover { x: xs[best], rates: RateTuple(a.iter().map(|w| w * rate).collect()), rate })
}

fn check_profile(alpha: &RateProfile, scn: &Scenario) -> Result<()> {
    scn.validate()?;
    if alpha.len() != scn.num_users() {
        return Err(Error::InvalidInput(format!(
            "rate profile has {} entries for {} users",
            alpha.len(),
            scn.num_users()
        )));
    }
    Ok(())
}

/// Largest `R` with `alpha R` achievable at fixed SNRs.
pub fn static_rate(scheme: Scheme, alpha: &[f64], snr: &[f64]) -> f64 {
    let log2p = |v: f64| v.ln_1p() / LN_2;
    let active: Vec<usize> = (0..alpha.len()).filter(|&k| alpha[k] > 0.0).collect();
    match scheme {
        Scheme::Noma => {
            let mut best = f64::INFINITY;
            for mask in 1usize..(1 << active.len()) {
                let (mut s, mut a) = (0.0, 0.0);
                for (j, &k) in active.iter().enumerate() {
                    if mask & (1 << j) != 0 {
                        s += snr[k];
                        a += alpha[k];
                    }
                }
                best = best.min(log2p(s) / a);
            }
            best
        }
        Scheme::Tdma => 1.0 / active.iter().map(|&k| alpha[k] / log2p(snr[k])).sum::<f64>(),
        Scheme::Fdma => {
            let need = |r: f64| -> f64 { active.iter().map(|&k| bandwidth_for(alpha[k] * r, snr[k])).sum() };
            let mut lo = 0.0;
            let mut hi = active.iter().map(|&k| log2p(snr[k]) / alpha[k]).fold(f64::INFINITY, f64::min);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if need(mid) <= 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-14 * hi {
                    break;
                }
            }
            lo
        }
    }
}

/// Smallest bandwidth fraction carrying rate `r` at SNR `snr`; infinite when
/// the full band is not enough.
fn bandwidth_for(r: f64, snr: f64) -> f64 {
    let rate = |b: f64| if b <= 0.0 { 0.0 } else { b * (snr / b).ln_1p() / LN_2 };
    if r <= 0.0 {
        return 0.0;
    }
    if rate(1.0) < r {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rate(mid) >= r {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-16 {
            break;
        }
    }
    hi
}

/// Grids of the two-user hover-fly-hover oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleGrid {
    /// Points per endpoint axis over `[w_1, w_2]`.
    pub endpoint_points: usize,
    /// Integration intervals per endpoint-grid interval; a multiple of 4 so
    /// that the quarter-step refinement stays on integration nodes.
    pub subdivisions: usize,
    /// Initial grid over the first hover duration before golden refinement.
    pub time_points: usize,
    /// Multiplier grid for the FDMA minimax.
    pub theta_points: usize,
    /// Quarter-step 9x9 search around the best endpoint pair.
    pub refine: bool,
}

impl Default for OracleGrid {
    fn default() -> Self {
        Self { endpoint_points: 81, subdivisions: 16, time_points: 41, theta_points: 401, refine: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub rate: f64,
    pub x_initial: f64,
    pub x_final: f64,
    /// Hover time at `x_initial`.
    pub t_initial: f64,
}

/// A function of position with its running integral on the oracle nodes.
struct Tabulated {
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

struct Line {
    xs: Vec<f64>,
    h: f64,
}

impl Line {
    fn tabulate(&self, f: impl Fn(f64) -> f64) -> Tabulated {
        let values: Vec<f64> = self.xs.iter().map(|&x| f(x)).collect();
        let mut cumulative = vec![0.0; values.len()];
        for i in 1..values.len() {
            let mid = f(0.5 * (self.xs[i - 1] + self.xs[i]));
            cumulative[i] = cumulative[i - 1] + self.h / 6.0 * (values[i - 1] + 4.0 * mid + values[i]);
        }
        Tabulated { values, cumulative }
    }

    /// Integral from the first node to `x` using cubic Hermite interpolation
    /// of the running integral inside the node interval.
    fn integral_to(&self, t: &Tabulated, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 1 || x <= self.xs[0] {
            return 0.0;
        }
        let pos = (x - self.xs[0]) / self.h;
        let i = (pos.floor() as usize).min(n - 2);
        let s = (pos - i as f64).clamp(0.0, 1.0);
        let (f0, f1) = (t.cumulative[i], t.cumulative[i + 1]);
        let (d0, d1) = (t.values[i] * self.h, t.values[i + 1] * self.h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * f0 + (s3 - 2.0 * s2 + s) * d0 + (-2.0 * s3 + 3.0 * s2) * f1 + (s3 - s2) * d1
    }
}

/// Hover-fly-hover geometry on node indices.
#[derive(Clone, Copy)]
struct Hfh {
    i: usize,
    f: usize,
    hover: f64,
}

trait InnerRate: Sync {
    /// Common rate of the HFH trajectory with `t_i` seconds at the first node.
    fn rate(&self, g: Hfh, t_i: f64) -> f64;
}

struct NomaInner {
    v: f64,
    horizon: f64,
    /// Subsets `{1}`, `{2}`, `{1, 2}` with their profile mass.
    subsets: Vec<(Tabulated, f64)>,
}

impl InnerRate for NomaInner {
    fn rate(&self, g: Hfh, t_i: f64) -> f64 {
        self.subsets
            .iter()
            .filter(|(_, a)| *a > 0.0)
            .map(|(c, a)| {
                let leg = (c.cumulative[g.f] - c.cumulative[g.i]) / self.v;
                let leg = if g.f > g.i { leg } else { 0.0 };
                (t_i * c.values[g.i] + leg + (g.hover - t_i) * c.values[g.f]) / (self.horizon * a)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

struct FdmaInner {
    v: f64,
    horizon: f64,
    /// Envelope `max_b lambda(theta) . r(b)` per multiplier.
    tables: Vec<Tabulated>,
}

impl FdmaInner {
    fn values(&self, g: Hfh, t_i: f64) -> Vec<f64> {
        self.tables
            .iter()
            .map(|c| {
                let leg = if g.f > g.i { (c.cumulative[g.f] - c.cumulative[g.i]) / self.v } else { 0.0 };
                (t_i * c.values[g.i] + leg + (g.hover - t_i) * c.values[g.f]) / self.horizon
            })
            .collect()
    }
}

impl InnerRate for FdmaInner {
    fn rate(&self, g: Hfh, t_i: f64) -> f64 {
        let d = self.values(g, t_i);
        let mut j = 0;
        for i in 1..d.len() {
            if d[i] < d[j] {
                j = i;
            }
        }
        // Parabolic correction of the grid minimum of the convex dual.
        if j > 0 && j + 1 < d.len() {
            let (a, b, c) = (d[j - 1], d[j], d[j + 1]);
            let curv = a - 2.0 * b + c;
            if curv > 0.0 {
                return b - (c - a) * (c - a) / (8.0 * curv);
            }
        }
        d[j]
    }
}

struct TdmaInner<'a> {
    line: &'a Line,
    v: f64,
    horizon: f64,
    alpha: [f64; 2],
    rates: [Tabulated; 2],
}

impl TdmaInner<'_> {
    /// Running integral of user `k`'s rate along the timeline up to `tau`.
    fn served(&self, k: usize, g: Hfh, t_i: f64, tau: f64) -> f64 {
        let c = &self.rates[k];
        let x_i = self.line.xs[g.i];
        let flight = if g.f > g.i { (self.line.xs[g.f] - x_i) / self.v } else { 0.0 };
        if tau <= t_i {
            return tau * c.values[g.i];
        }
        let mut acc = t_i * c.values[g.i];
        let in_flight = (tau - t_i).min(flight);
        if in_flight > 0.0 {
            let x = x_i + self.v * in_flight;
            acc += (self.line.integral_to(c, x) - c.cumulative[g.i]) / self.v;
        }
        let after = tau - t_i - flight;
        if after > 0.0 {
            acc += after * c.values[g.f];
        }
        acc
    }
}

impl InnerRate for TdmaInner<'_> {
    fn rate(&self, g: Hfh, t_i: f64) -> f64 {
        // User 1's rate to user 2's decreases along the flight, so user 1 is
        // served first and a single switching time is optimal.
        let t = self.horizon;
        let total2 = self.served(1, g, t_i, t);
        let gap = |tau: f64| self.served(0, g, t_i, tau) / self.alpha[0] - (total2 - self.served(1, g, t_i, tau)) / self.alpha[1];
        let (mut lo, mut hi) = (0.0, t);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * t {
                break;
            }
        }
        let tau = 0.5 * (lo + hi);
        let r1 = self.served(0, g, t_i, tau) / self.alpha[0];
        let r2 = (total2 - self.served(1, g, t_i, tau)) / self.alpha[1];
        r1.min(r2) / t
    }
}

/// Largest value of a concave function on `[0, len]`: grid then golden
/// section inside the bracket of the best grid point.
fn maximize_concave(f: impl Fn(f64) -> f64, len: f64, points: usize) -> (f64, f64) {
    if len <= 0.0 {
        return (0.0, f(0.0));
    }
    let n = points.max(2);
    let step = len / (n - 1) as f64;
    let mut best = (0.0, f(0.0));
    for j in 1..n {
        let t = (step * j as f64).min(len);
        let v = f(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(0.0), (best.0 + step).min(len));
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-10 * len {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    for (t, v) in [(c, fc), (d, fd)] {
        if v > best.1 {
            best = (t, v);
        }
    }
    best
}

/// Brute-force maximum of the common rate over hover-fly-hover trajectories
/// for two users: endpoint grids, the first hover duration, and the exact
/// inner resource allocation of `scheme`.
pub fn oracle_two_user_hfh(
    scheme: Scheme,
    alpha: &RateProfile,
    scn: &Scenario,
    grid: &OracleGrid,
) -> Result<OracleResult> {
    check_profile(alpha, scn)?;
    if scn.num_users() != 2 {
        return Err(Error::InvalidInput(format!("oracle needs 2 users, got {}", scn.num_users())));
    }
    let a = alpha.as_slice();
    if a.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidInput("oracle needs a strictly positive rate profile".into()));
    }
    if grid.endpoint_points < 2 || grid.subdivisions == 0 || !grid.subdivisions.is_multiple_of(4) {
        return Err(Error::InvalidInput("oracle grid: endpoint_points >= 2, subdivisions a positive multiple of 4".into()));
    }
    let (lo, hi) = scn.span();
    let intervals = if hi > lo { (grid.endpoint_points - 1) * grid.subdivisions } else { 0 };
    let h = if intervals > 0 { (hi - lo) / intervals as f64 } else { 0.0 };
    let xs: Vec<f64> = (0..=intervals).map(|i| if i == intervals { hi } else { lo + h * i as f64 }).collect();
    let line = Line { xs, h };
    let log2p = |v: f64| v.ln_1p() / LN_2;
    match scheme {
        Scheme::Noma => {
            let subsets = vec![
                (line.tabulate(|x| log2p(scn.snr(0, x))), a[0]),
                (line.tabulate(|x| log2p(scn.snr(1, x))), a[1]),
                (line.tabulate(|x| log2p(scn.snr(0, x) + scn.snr(1, x))), 1.0),
            ];
            let inner = NomaInner { v: scn.v_max, horizon: scn.horizon, subsets };
            search_hfh(&inner, &line, scn, grid)
        }
        Scheme::Tdma => {
            let rates = [line.tabulate(|x| scn.rate(0, x)), line.tabulate(|x| scn.rate(1, x))];
            let inner = TdmaInner { line: &line, v: scn.v_max, horizon: scn.horizon, alpha: [a[0], a[1]], rates };
            search_hfh(&inner, &line, scn, grid)
        }
        Scheme::Fdma => {
            let n = grid.theta_points.max(3);
            let tables: Vec<Tabulated> = (0..n)
                .into_par_iter()
                .map(|j| {
                    let theta = j as f64 / (n - 1) as f64;
                    let lambda = [theta / a[0], (1.0 - theta) / a[1]];
                    line.tabulate(|x| fdma_envelope(lambda, scn.snr(0, x), scn.snr(1, x)))
                })
                .collect();
            let inner = FdmaInner { v: scn.v_max, horizon: scn.horizon, tables };
            search_hfh(&inner, &line, scn, grid)
        }
    }
}

/// `max_b lambda_1 b log2(1 + s_1/b) + lambda_2 (1-b) log2(1 + s_2/(1-b))`
/// by bisection on the derivative.
fn fdma_envelope(lambda: [f64; 2], s1: f64, s2: f64) -> f64 {
    let part = |b: f64, s: f64| if b <= 0.0 { 0.0 } else { b * (s / b).ln_1p() / LN_2 };
    if lambda[0] <= 0.0 {
        return lambda[1] * part(1.0, s2);
    }
    if lambda[1] <= 0.0 {
        return lambda[0] * part(1.0, s1);
    }
    let slope = |u: f64| (u.ln_1p() - u / (1.0 + u)) / LN_2;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..100 {
        let b = 0.5 * (lo + hi);
        if lambda[0] * slope(s1 / b) > lambda[1] * slope(s2 / (1.0 - b)) {
            lo = b;
        } else {
            hi = b;
        }
        if hi - lo <= 1e-16 {
            break;
        }
    }
    let b = 0.5 * (lo + hi);
    lambda[0] * part(b, s1) + lambda[1] * part(1.0 - b, s2)
}

fn search_hfh(inner: &impl InnerRate, line: &Line, scn: &Scenario, grid: &OracleGrid) -> Result<OracleResult> {
    let n = line.xs.len();
    let stride = if n > 1 { grid.subdivisions } else { 1 };
    let coarse: Vec<usize> = (0..n).step_by(stride).collect();
    let evaluate = |i: usize, f: usize| -> Option<(f64, f64)> {
        let (x_i, x_f) = (line.xs[i], line.xs[f]);
        if !scn.is_reachable(x_i, x_f) {
            return None;
        }
        let hover = (scn.horizon - scn.flight_time(x_i, x_f)).max(0.0);
        let g = Hfh { i, f, hover };
        let (t, v) = maximize_concave(|t| inner.rate(g, t), hover, grid.time_points);
        Some((t, v))
    };
    let pairs: Vec<(usize, usize)> =
        coarse.iter().flat_map(|&i| coarse.iter().filter(move |&&f| f >= i).map(move |&f| (i, f))).collect();
    let best_of = |pairs: &[(usize, usize)]| -> Option<(usize, usize, f64, f64)> {
        pairs
            .par_iter()
            .filter_map(|&(i, f)| evaluate(i, f).map(|(t, v)| (i, f, t, v)))
            .reduce_with(|p, q| if q.3 > p.3 || (q.3 == p.3 && (q.0, q.1) < (p.0, p.1)) { q } else { p })
    };
    let mut best = best_of(&pairs).ok_or(Error::NoFeasibleCell)?;
    if grid.refine && n > 1 {
        let quarter = (stride / 4) as i64;
        let around = |c: usize| -> Vec<usize> {
            (-4..=4).map(|j| (c as i64 + j * quarter).clamp(0, n as i64 - 1) as usize).collect()
        };
        let mut local: Vec<(usize, usize)> = Vec::new();
        for i in around(best.0) {
            for f in around(best.1) {
                if f >= i && !local.contains(&(i, f)) {
                    local.push((i, f));
                }
            }
        }
        if let Some(b) = best_of(&local) {
            if b.3 > best.3 {
                best = b;
            }
        }
    }
    Ok(OracleResult { rate: best.3, x_initial: line.xs[best.0], x_final: line.xs[best.1], t_initial: best.2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_rates_of_symmetric_pair() {
        let snr = [1e3, 1e3];
        let c = (1e3f64).ln_1p() / LN_2;
        let half = [0.5, 0.5];
        assert!((static_rate(Scheme::Tdma, &half, &snr) - c).abs() < 1e-12);
        // Equal split of the band is optimal by symmetry.
        let f = 2.0 * 0.5 * (2e3f64).ln_1p() / LN_2;
        assert!((static_rate(Scheme::Fdma, &half, &snr) - f).abs() < 1e-9);
        let n = (2e3f64).ln_1p() / LN_2;
        assert!((static_rate(Scheme::Noma, &half, &snr) - n).abs() < 1e-12);
    }

    #[test]
    fn fdma_envelope_matches_brute_force() {
        let (s1, s2) = (300.0, 40.0);
        let lambda = [0.7, 1.6];
        let part = |b: f64, s: f64| if b <= 0.0 { 0.0 } else { b * (s / b).ln_1p() / LN_2 };
        let brute = (0..=100_000)
            .map(|i| {
                let b = i as f64 / 100_000.0;
                lambda[0] * part(b, s1) + lambda[1] * part(1.0 - b, s2)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let v = fdma_envelope(lambda, s1, s2);
        assert!(v >= brute - 1e-12 && v - brute < 1e-6);
    }

    #[test]
    fn hermite_integral_is_exact_for_cubics() {
        let line = Line { xs: (0..=10).map(|i| i as f64).collect(), h: 1.0 };
        let t = line.tabulate(|x| x * x);
        for x in [0.0, 0.3, 2.5, 7.75, 10.0] {
            assert!((line.integral_to(&t, x) - x * x * x / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn golden_finds_interior_peak() {
        let (t, v) = maximize_concave(|t| -(t - 3.3) * (t - 3.3), 10.0, 11);
        assert!((t - 3.3).abs() < 1e-6 && v.abs() < 1e-10);
    }
}
