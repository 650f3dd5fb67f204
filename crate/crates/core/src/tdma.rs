//! Capacity region under TDMA: one user active at a time.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::dual::{
    column_generation, count_hover_clusters, hover_locations, minimize_dual, search_endpoints, timeshare, CellProblem,
    ColumnPool, DualBound, SolveDiagnostics,
};
use crate::error::{Error, Result};
use crate::numerics::SimpsonRule;
use crate::scenario::{DualVector, RateProfile, RateTuple, Scenario, SolverSettings};
use crate::trajectory::{assemble_shf, MaxSpeedLeg, PhaseKind, ShfTrajectory};

/// Crossings are located to this many meters.
const CROSSING_TOL: f64 = 1e-6;

fn rates_of(snr: &[f64]) -> Vec<f64> {
    snr.iter().map(|s| s.ln_1p() / LN_2).collect()
}

fn argmax_weighted(dual: &[f64], rates: &[f64]) -> usize {
    let mut best = 0;
    for k in 1..dual.len() {
        if dual[k] * rates[k] > dual[best] * rates[best] {
            best = k;
        }
    }
    best
}

/// User with the largest weighted full-band rate at `x`; ties go to the
/// lower index.
pub fn best_user(dual: &DualVector, x: f64, scn: &Scenario) -> usize {
    argmax_weighted(dual.weights(), &rates_of(&scn.snrs(x)))
}

/// Contiguous stretch of the flight leg served by one user. Times are leg
/// times measured from the start of the flight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlightSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub x_start: f64,
    pub x_end: f64,
    pub user: usize,
}

/// Leg of an endpoint cell with the per-node full-band rates cached.
struct LegTable {
    x_start: f64,
    x_end: f64,
    v_max: f64,
    rule: SimpsonRule,
    /// `[node][user]`.
    rates: Vec<Vec<f64>>,
    /// Simpson integral of each user's rate over each node pair, `[pair][user]`.
    pair_integrals: Vec<Vec<f64>>,
}

impl LegTable {
    fn new(leg: &MaxSpeedLeg, scn: &Scenario, panels: usize) -> Self {
        let rule = SimpsonRule::new(0.0, leg.duration, panels);
        let rates: Vec<Vec<f64>> = rule.nodes.iter().map(|&t| rates_of(&scn.snrs(leg.position(t)))).collect();
        let k = scn.num_users();
        let pair_integrals = (0..rule.pair_count())
            .map(|j| {
                let h = rule.nodes[2 * j + 2] - rule.nodes[2 * j];
                (0..k)
                    .map(|u| h / 6.0 * (rates[2 * j][u] + 4.0 * rates[2 * j + 1][u] + rates[2 * j + 2][u]))
                    .collect()
            })
            .collect();
        Self { x_start: leg.x_start, x_end: leg.x_end, v_max: leg.v_max, rule, rates, pair_integrals }
    }

    fn position(&self, t: f64) -> f64 {
        (self.x_start + self.v_max * t).min(self.x_end)
    }

    fn time(&self, x: f64) -> f64 {
        (x - self.x_start) / self.v_max
    }

    /// Crossing positions in `(lo, hi)` between the winners `ka` at `lo` and
    /// `kb` at `hi`, recursing when a third user wins in between.
    fn crossings(&self, dual: &[f64], scn: &Scenario, lo: f64, hi: f64, ka: usize, kb: usize, out: &mut Vec<f64>) {
        if ka == kb {
            return;
        }
        let mid = 0.5 * (lo + hi);
        if hi - lo <= CROSSING_TOL {
            out.push(mid);
            return;
        }
        let km = argmax_weighted(dual, &rates_of(&scn.snrs(mid)));
        if km == ka {
            self.crossings(dual, scn, mid, hi, ka, kb, out);
        } else if km == kb {
            self.crossings(dual, scn, lo, mid, ka, kb, out);
        } else {
            self.crossings(dual, scn, lo, mid, ka, km, out);
            self.crossings(dual, scn, mid, hi, km, kb, out);
        }
    }

    /// Per-user integrals of the own rate over the argmax regions, and the
    /// flight partition.
    fn integrals(&self, dual: &[f64], scn: &Scenario) -> (Vec<f64>, Vec<FlightSegment>) {
        let k = scn.num_users();
        let mut totals = vec![0.0; k];
        let n = self.rule.len();
        if n == 0 {
            return (totals, Vec::new());
        }
        let winners: Vec<usize> = self.rates.iter().map(|r| argmax_weighted(dual, r)).collect();
        let mut cuts: Vec<f64> = Vec::new();
        for i in 0..n - 1 {
            if winners[i] != winners[i + 1] {
                let lo = self.position(self.rule.nodes[i]);
                let hi = self.position(self.rule.nodes[i + 1]);
                let mut xs = Vec::new();
                self.crossings(dual, scn, lo, hi, winners[i], winners[i + 1], &mut xs);
                cuts.extend(xs.into_iter().map(|x| self.time(x)));
            }
        }
        let mut c = 0;
        for j in 0..self.rule.pair_count() {
            let (a, b) = (self.rule.nodes[2 * j], self.rule.nodes[2 * j + 2]);
            let start = c;
            while c < cuts.len() && cuts[c] <= b {
                c += 1;
            }
            let inner = &cuts[start..c];
            if inner.is_empty() {
                let u = winners[2 * j];
                totals[u] += self.pair_integrals[j][u];
                continue;
            }
            let mut edges = Vec::with_capacity(inner.len() + 2);
            edges.push(a);
            edges.extend(inner.iter().map(|t| t.clamp(a, b)));
            edges.push(b);
            for w in edges.windows(2) {
                let (t0, t1) = (w[0], w[1]);
                if t1 <= t0 {
                    continue;
                }
                let tm = 0.5 * (t0 + t1);
                let u = argmax_weighted(dual, &rates_of(&scn.snrs(self.position(tm))));
                let f = |t: f64| scn.rate(u, self.position(t));
                totals[u] += (t1 - t0) / 6.0 * (f(t0) + 4.0 * f(tm) + f(t1));
            }
        }
        let mut segments: Vec<FlightSegment> = Vec::new();
        let mut edges = vec![0.0];
        edges.extend(cuts.iter().copied());
        edges.push(self.rule.nodes[n - 1]);
        for w in edges.windows(2) {
            let (t0, t1) = (w[0], w[1].max(w[0]));
            let user = argmax_weighted(dual, &rates_of(&scn.snrs(self.position(0.5 * (t0 + t1)))));
            match segments.last_mut() {
                Some(s) if s.user == user => {
                    s.t_end = t1;
                    s.x_end = self.position(t1);
                }
                _ => segments.push(FlightSegment {
                    t_start: t0,
                    t_end: t1,
                    x_start: self.position(t0),
                    x_end: self.position(t1),
                    user,
                }),
            }
        }
        (totals, segments)
    }
}

/// Per-user integral of the own rate over the stretches of `leg` where the
/// user has the largest weighted rate.
pub fn flight_rate_integrals(dual: &DualVector, leg: &MaxSpeedLeg, scn: &Scenario, panels: usize) -> Vec<f64> {
    LegTable::new(leg, scn, panels).integrals(dual.weights(), scn).0
}

/// Crossings of the weighted-rate argmax over `[w_1, w_K]` as
/// `(user on the left, position)`.
pub fn switching_points(dual: &DualVector, scn: &Scenario) -> Vec<(usize, f64)> {
    let (lo, hi) = scn.span();
    if hi <= lo {
        return Vec::new();
    }
    let leg = MaxSpeedLeg::new(lo, hi, 1.0).expect("ordered span");
    let table = LegTable::new(&leg, scn, 2048);
    let (_, segments) = table.integrals(dual.weights(), scn);
    segments.windows(2).map(|w| (w[0].user, w[0].x_end)).collect()
}

/// Hover durations for users `users` maximizing the common rate given the
/// flight integrals; returns `(tau per user, rates, R)`.
pub fn hover_duration_lp(
    flight_integrals: &[f64],
    alpha: &RateProfile,
    users: &[usize],
    hover_time: f64,
    scn: &Scenario,
) -> Result<(Vec<f64>, RateTuple, f64)> {
    let k = scn.num_users();
    if flight_integrals.len() != k || alpha.len() != k {
        return Err(Error::InvalidInput("flight integrals and profile must have one entry per user".into()));
    }
    if !(hover_time >= 0.0) {
        return Err(Error::InvalidInput(format!("hover time {hover_time} must be >= 0")));
    }
    if hover_time > 0.0 && users.is_empty() {
        return Err(Error::InvalidInput("positive hover time with no user to hover above".into()));
    }
    let base: Vec<f64> = flight_integrals.iter().map(|f| f / scn.horizon).collect();
    let columns = hover_columns(users, hover_time, scn);
    let share = timeshare(&columns, &base, alpha.as_slice())?;
    let mut tau = vec![0.0; k];
    if hover_time > 0.0 {
        for (&u, w) in users.iter().zip(&share.weights) {
            tau[u] = w * hover_time;
        }
    }
    Ok((tau, RateTuple(share.rates), share.sum_rate))
}

fn site_columns(sites: &[(f64, usize, f64)], hover_time: f64, scn: &Scenario) -> Vec<Vec<f64>> {
    let k = scn.num_users();
    if sites.is_empty() || hover_time <= 0.0 {
        return vec![vec![0.0; k]];
    }
    sites
        .iter()
        .map(|&(_, u, c)| {
            let mut col = vec![0.0; k];
            col[u] = hover_time * c / scn.horizon;
            col
        })
        .collect()
}

fn hover_columns(users: &[usize], hover_time: f64, scn: &Scenario) -> Vec<Vec<f64>> {
    let k = scn.num_users();
    if users.is_empty() || hover_time <= 0.0 {
        return vec![vec![0.0; k]];
    }
    users
        .iter()
        .map(|&u| {
            let mut c = vec![0.0; k];
            c[u] = hover_time * scn.rate(u, scn.layout.positions[u]) / scn.horizon;
            c
        })
        .collect()
}

/// A flight partition used for a `weight` share of the flight time at every
/// position of the leg.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlightShare {
    pub weight: f64,
    /// Multiplier whose weighted-rate argmax defines the partition.
    pub dual: DualVector,
    pub segments: Vec<FlightSegment>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TdmaSchedule {
    /// Time-shared flight partitions; weights sum to one.
    pub flight: Vec<FlightShare>,
    /// Total hover time serving each user.
    pub hover_durations: Vec<f64>,
    /// User served at each hover point of the trajectory.
    pub served: Vec<usize>,
}

/// `user` holds a `share` of the channel time over `[t_start, t_end]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelineEntry {
    pub t_start: f64,
    pub t_end: f64,
    pub user: usize,
    pub share: f64,
    pub hovering: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TdmaSolution {
    pub shf: ShfTrajectory,
    /// Clustered near-tie maximizers of the hover objective at `dual`: the
    /// candidate hover set the time-sharing chooses from.
    pub hover_locations: Vec<f64>,
    pub schedule: TdmaSchedule,
    pub rates: RateTuple,
    pub sum_rate: f64,
    pub dual: DualVector,
    pub dual_value: f64,
    pub diagnostics: SolveDiagnostics,
}

impl TdmaSolution {
    pub fn duality_gap(&self) -> f64 {
        self.dual_value - self.sum_rate
    }

    /// Size of the candidate hover set.
    pub fn hover_count(&self) -> usize {
        self.hover_locations.len()
    }

    /// Hover locations with positive dwell time.
    pub fn dwell_count(&self) -> usize {
        count_hover_clusters(&self.shf, 0.0)
    }

    /// Channel assignment over the whole horizon. Entries of different flight
    /// partitions overlap in time; their shares add up to one.
    pub fn timeline(&self) -> Vec<TimelineEntry> {
        let mut out = Vec::new();
        for phase in self.shf.phases() {
            match phase.kind {
                PhaseKind::Hover { index, x } => {
                    let user = self.schedule.served[index];
                    debug_assert_eq!(x, self.shf.hover_points[index]);
                    out.push(TimelineEntry {
                        t_start: phase.t_start,
                        t_end: phase.t_end,
                        user,
                        share: 1.0,
                        hovering: true,
                    });
                }
                PhaseKind::Flight { x_from, x_to } => {
                    for part in &self.schedule.flight {
                        for s in &part.segments {
                            let lo = s.x_start.max(x_from);
                            let hi = s.x_end.min(x_to);
                            if hi > lo {
                                out.push(TimelineEntry {
                                    t_start: phase.t_start + (lo - x_from) / self.shf.v_max,
                                    t_end: phase.t_start + (hi - x_from) / self.shf.v_max,
                                    user: s.user,
                                    share: part.weight,
                                    hovering: false,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Time share of each user at time `t`; at a phase boundary the later
    /// phase counts.
    pub fn shares_at(&self, t: f64) -> Vec<f64> {
        let timeline = self.timeline();
        let mut shares = vec![0.0; self.schedule.hover_durations.len()];
        let covers = |e: &TimelineEntry| e.t_end > e.t_start && t >= e.t_start && (t < e.t_end || e.t_end >= self.shf.horizon);
        let phase_start = timeline.iter().filter(|e| covers(e)).map(|e| e.t_start).fold(f64::NEG_INFINITY, f64::max);
        let hovering = timeline.iter().any(|e| covers(e) && e.hovering && e.t_start == phase_start);
        for e in timeline.iter().filter(|e| covers(e) && e.hovering == hovering) {
            shares[e.user] += e.share;
        }
        shares
    }

    /// Average rates recomputed from the timeline with fresh quadrature.
    pub fn recompute_rates(&self, scn: &Scenario, panels: usize) -> RateTuple {
        let mut out = vec![0.0; scn.num_users()];
        let x_at = |t: f64| self.shf.to_piecewise().position(t);
        for e in self.timeline() {
            if e.hovering {
                out[e.user] += e.share * (e.t_end - e.t_start) * scn.rate(e.user, x_at(0.5 * (e.t_start + e.t_end)));
            } else {
                let (a, b) = (x_at(e.t_start), x_at(e.t_end));
                let piece = [crate::trajectory::LinearPiece { duration: e.t_end - e.t_start, x_from: a, x_to: b }];
                out[e.user] += e.share * crate::trajectory::integrate_pieces(&piece, |x| scn.rate(e.user, x), panels);
            }
        }
        RateTuple(out.into_iter().map(|v| v / scn.horizon).collect())
    }
}

/// Endpoint cell for TDMA: hovering is allowed only above the users between
/// the endpoints.
pub(crate) struct TdmaCell<'a> {
    scn: &'a Scenario,
    settings: &'a SolverSettings,
    alpha: &'a [f64],
    x_initial: f64,
    x_final: f64,
    hover_time: f64,
    /// `(hover point, served user, rate)`.
    sites: Vec<(f64, usize, f64)>,
    leg: LegTable,
}

impl<'a> TdmaCell<'a> {
    fn open(scn: &'a Scenario, settings: &'a SolverSettings, alpha: &'a [f64], x_i: f64, x_f: f64) -> Option<Self> {
        if !scn.is_reachable(x_i, x_f) {
            return None;
        }
        let leg = MaxSpeedLeg::new(x_i, x_f, scn.v_max).ok()?;
        let flight = leg.duration.min(scn.horizon);
        let hover_time = (scn.horizon - flight).max(0.0);
        let sites: Vec<(f64, usize, f64)> = if x_i == x_f {
            (0..scn.num_users()).map(|u| (x_i, u, scn.rate(u, x_i))).collect()
        } else {
            scn.users_between(x_i, x_f)
                .into_iter()
                .map(|u| {
                    let w = scn.layout.positions[u];
                    (w, u, scn.rate(u, w))
                })
                .collect()
        };
        if sites.is_empty() && hover_time > 1e-9 * scn.horizon {
            return None;
        }
        Some(Self {
            scn,
            settings,
            alpha,
            x_initial: x_i,
            x_final: x_f,
            hover_time,
            sites,
            leg: LegTable::new(&leg, scn, settings.leg_panels),
        })
    }

    fn evaluate(&self, dual: &[f64]) -> (f64, Vec<f64>) {
        let (flight, _) = self.leg.integrals(dual, self.scn);
        let t = self.scn.horizon;
        let mut rates: Vec<f64> = flight.iter().map(|f| f / t).collect();
        let mut value: f64 = dual.iter().zip(&flight).map(|(a, b)| a * b).sum::<f64>() / t;
        if self.hover_time > 0.0 && !self.sites.is_empty() {
            let mut best = 0;
            for (i, &(_, u, c)) in self.sites.iter().enumerate().skip(1) {
                let (_, b, cb) = self.sites[best];
                if dual[u] * c > dual[b] * cb {
                    best = i;
                }
            }
            let (_, u, c) = self.sites[best];
            rates[u] += self.hover_time * c / t;
            value += self.hover_time * dual[u] * c / t;
        }
        (value, rates)
    }

    fn solve(self, cutoff: Option<f64>) -> Result<Option<TdmaSolution>> {
        let scn = self.scn;
        let alpha = self.alpha;
        let settings = self.settings;
        let Some(min) = minimize_dual(alpha, settings, cutoff, |d| Ok(self.evaluate(d)))? else {
            return Ok(None);
        };
        let hover = site_columns(&self.sites, self.hover_time, scn);
        // Flight partitions priced so far: (multiplier, segments).
        let mut partitions: Vec<(Vec<f64>, Vec<FlightSegment>)> = Vec::new();
        let mut pool: ColumnPool<(usize, usize)> = ColumnPool::new();
        let add_partition = |dual: &[f64], partitions: &mut Vec<(Vec<f64>, Vec<FlightSegment>)>| {
            let (flight, segments) = self.leg.integrals(dual, scn);
            let j = partitions.len();
            partitions.push((dual.to_vec(), segments));
            hover
                .iter()
                .enumerate()
                .map(|(i, h)| ((j, i), flight.iter().zip(h).map(|(f, h)| f / scn.horizon + h).collect()))
                .collect::<Vec<((usize, usize), Vec<f64>)>>()
        };
        for (key, col) in add_partition(&min.dual, &mut partitions) {
            pool.insert(key, col);
        }
        let mut bound = DualBound { value: self.evaluate(&min.dual).0, dual: min.dual.clone() };
        let zero = vec![0.0; alpha.len()];
        let (share, polish) = column_generation(&mut pool, &zero, alpha, &mut bound, settings, |mu| {
            let value = self.evaluate(mu).0;
            Ok((value, add_partition(mu, &mut partitions)))
        })?;

        let mut flight_weight = vec![0.0; partitions.len()];
        let mut site_weight = vec![0.0; hover.len()];
        for (&(j, i), &w) in pool.keys.iter().zip(&share.weights) {
            flight_weight[j] += w;
            site_weight[i] += w;
        }
        let flight: Vec<FlightShare> = partitions
            .into_iter()
            .zip(&flight_weight)
            .filter(|(_, w)| **w > 0.0)
            .map(|((dual, segments), &weight)| FlightShare { weight, dual: DualVector(dual), segments })
            .collect();
        let mut tau = vec![0.0; scn.num_users()];
        let mut durations = vec![0.0; self.sites.len()];
        if self.hover_time > 0.0 && !self.sites.is_empty() {
            for ((&(_, u, _), w), d) in self.sites.iter().zip(&site_weight).zip(&mut durations) {
                *d = w * self.hover_time;
                tau[u] += *d;
            }
        }
        let points: Vec<f64> = self.sites.iter().map(|s| s.0).collect();
        let served: Vec<usize> = self.sites.iter().map(|s| s.1).collect();
        let shf = assemble_shf(self.x_initial, self.x_final, points, durations, scn.v_max, scn.horizon)?;
        for part in &flight {
            check_structure(part.dual.weights(), &part.segments, scn);
        }
        let gap = bound.value - share.sum_rate;
        if gap > settings.gap_tol {
            log::warn!("TDMA duality gap {gap:e} exceeds {:e}", settings.gap_tol);
        }
        Ok(Some(TdmaSolution {
            hover_locations: Vec::new(),
            shf,
            schedule: TdmaSchedule { flight, hover_durations: tau, served },
            rates: RateTuple(share.rates),
            sum_rate: share.sum_rate,
            dual: DualVector(bound.dual),
            dual_value: bound.value,
            diagnostics: SolveDiagnostics {
                ellipsoid_iterations: min.iterations,
                ellipsoid_converged: min.converged,
                polish_iterations: polish,
                columns: pool.len(),
                ..Default::default()
            },
        }))
    }
}

/// Warns when a user's gain peaks away from its own position or the active
/// user does not advance with the flight.
fn check_structure(dual: &[f64], segments: &[FlightSegment], scn: &Scenario) {
    let (lo, hi) = scn.span();
    for (u, &w) in scn.layout.positions.iter().enumerate() {
        let own = scn.gain(u, w);
        for x in [lo, hi, w - 1.0, w + 1.0] {
            if scn.gain(u, x) > own * (1.0 + 1e-12) {
                log::warn!("gain of user {u} exceeds its overhead value at x = {x}");
            }
        }
    }
    let active: Vec<usize> = segments.iter().filter(|s| dual[s.user] > 0.0).map(|s| s.user).collect();
    if active.windows(2).any(|w| w[1] < w[0]) {
        log::warn!("active user is not monotone along the flight: {active:?}");
    }
}

fn check_inputs(alpha: &RateProfile, scn: &Scenario, settings: &SolverSettings) -> Result<()> {
    scn.validate()?;
    settings.validate()?;
    if alpha.len() != scn.num_users() {
        return Err(Error::InvalidInput(format!(
            "rate profile has {} entries for {} users",
            alpha.len(),
            scn.num_users()
        )));
    }
    Ok(())
}

/// Optimal TDMA trajectory and schedule for fixed endpoints.
pub fn solve_p3_fixed_endpoints(
    x_i: f64,
    x_f: f64,
    alpha: &RateProfile,
    scn: &Scenario,
    settings: &SolverSettings,
) -> Result<TdmaSolution> {
    check_inputs(alpha, scn, settings)?;
    let (lo, hi) = scn.span();
    if x_i < lo || x_f > hi || x_i > x_f {
        return Err(Error::InvalidInput(format!("endpoints ({x_i}, {x_f}) outside [{lo}, {hi}] or reversed")));
    }
    if !scn.is_reachable(x_i, x_f) {
        return Err(Error::InfeasibleHorizon { flight_time: scn.flight_time(x_i, x_f), horizon: scn.horizon });
    }
    let mut sol = TdmaCell::open(scn, settings, alpha.as_slice(), x_i, x_f)
        .ok_or_else(|| Error::InvalidInput(format!("no user between {x_i} and {x_f} to hover above")))?
        .solve(None)?
        .expect("no cutoff");
    let problem = TdmaProblem { scn, settings, alpha: alpha.as_slice() };
    sol.hover_locations = hover_locations(&problem, sol.dual.weights(), x_i, x_f, scn, settings)?;
    Ok(sol)
}

struct TdmaProblem<'a> {
    scn: &'a Scenario,
    settings: &'a SolverSettings,
    alpha: &'a [f64],
}

impl<'a> CellProblem for TdmaProblem<'a> {
    type Open = TdmaCell<'a>;
    type Solution = TdmaSolution;

    fn open(&self, x_i: f64, x_f: f64) -> Result<Option<Self::Open>> {
        Ok(TdmaCell::open(self.scn, self.settings, self.alpha, x_i, x_f))
    }

    fn envelope(&self, dual: &[f64], snrs: &[Vec<f64>]) -> Result<Vec<f64>> {
        Ok(snrs
            .iter()
            .map(|snr| {
                let r = rates_of(snr);
                dual.iter().zip(&r).map(|(a, b)| a * b).fold(0.0, f64::max)
            })
            .collect())
    }

    fn hovers_at_users(&self) -> bool {
        true
    }

    fn solve(&self, cell: Self::Open, cutoff: Option<f64>) -> Result<Option<TdmaSolution>> {
        cell.solve(cutoff)
    }

    fn sum_rate(sol: &TdmaSolution) -> f64 {
        sol.sum_rate
    }

    fn dual(sol: &TdmaSolution) -> &[f64] {
        sol.dual.weights()
    }

    fn diagnostics(sol: &mut TdmaSolution) -> &mut SolveDiagnostics {
        &mut sol.diagnostics
    }

    fn endpoints(sol: &TdmaSolution) -> (f64, f64) {
        (sol.shf.x_initial, sol.shf.x_final)
    }

    fn hover_locations(sol: &mut TdmaSolution) -> &mut Vec<f64> {
        &mut sol.hover_locations
    }
}

/// Pareto-boundary point of the TDMA capacity region in direction `alpha`.
pub fn solve_p3(alpha: &RateProfile, scn: &Scenario, settings: &SolverSettings) -> Result<TdmaSolution> {
    check_inputs(alpha, scn, settings)?;
    let problem = TdmaProblem { scn, settings, alpha: alpha.as_slice() };
    search_endpoints(&problem, scn, settings, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_pair_switches_at_midpoint() {
        let scn = Scenario::with_users(vec![0.0, 800.0]).unwrap();
        let pts = switching_points(&DualVector(vec![1.0, 1.0]), &scn);
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].0, 0);
        assert!((pts[0].1 - 400.0).abs() < 1e-5);
    }

    #[test]
    fn indicator_dual_keeps_one_user() {
        let scn = Scenario::with_users(vec![0.0, 800.0]).unwrap();
        assert!(switching_points(&DualVector(vec![0.0, 1.0]), &scn).is_empty());
        assert_eq!(best_user(&DualVector(vec![0.0, 1.0]), 0.0, &scn), 1);
    }
}
