//! Machinery shared by the three schemes: endpoint cells, the dual ellipsoid
//! driver, primal recovery by column generation, and the pruned search over
//! endpoint pairs.

use std::collections::HashSet;
use std::hash::Hash;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    ellipsoid_minimize, ellipsoid_minimize_below, near_tie_clusters, solve_lp, uniform_grid, Constraint, EllipsoidError, LpProblem, LpRow, LpStatus,
    SimpsonRule,
};
use crate::scenario::{DualVector, RateProfile, Scenario, SolverSettings};
use crate::trajectory::ShfTrajectory;

/// Counters describing how a solution was obtained.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveDiagnostics {
    pub ellipsoid_iterations: usize,
    pub ellipsoid_converged: bool,
    pub polish_iterations: usize,
    pub columns: usize,
    pub cells_solved: usize,
    pub cells_pruned: usize,
}

/// Candidate hover locations inside a cell.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum HoverSet {
    /// Uniform grid plus the user positions inside the cell.
    Grid,
    /// The user positions inside the cell.
    Users,
}

/// Precomputed geometry and SNRs of an endpoint pair `(x_I, x_F)`.
#[derive(Debug, Clone)]
pub(crate) struct Cell {
    pub x_initial: f64,
    pub x_final: f64,
    pub horizon: f64,
    pub hover_time: f64,
    pub hover_points: Vec<f64>,
    pub hover_step: f64,
    /// `[point][user]`.
    pub hover_snr: Vec<Vec<f64>>,
    /// Simpson rule in leg time `[0, flight_time]`.
    pub leg_rule: SimpsonRule,
    /// `[node][user]`.
    pub leg_snr: Vec<Vec<f64>>,
}

impl Cell {
    /// `None` when the horizon cannot cover the flight.
    pub fn open(scn: &Scenario, settings: &SolverSettings, x_i: f64, x_f: f64, hovers: HoverSet) -> Option<Self> {
        if !scn.is_reachable(x_i, x_f) {
            return None;
        }
        let flight_time = scn.flight_time(x_i, x_f).min(scn.horizon);
        let hover_time = (scn.horizon - flight_time).max(0.0);
        let hover_step = (x_f - x_i) / settings.hover_divisions as f64;
        let mut points = match hovers {
            HoverSet::Grid if x_f > x_i => uniform_grid(x_i, x_f, hover_step),
            HoverSet::Grid => vec![x_i],
            HoverSet::Users => Vec::new(),
        };
        points.extend(scn.users_between(x_i, x_f).into_iter().map(|k| scn.layout.positions[k]));
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
        let hover_snr = points.iter().map(|&x| scn.snrs(x)).collect();
        let leg_rule = SimpsonRule::new(0.0, flight_time, settings.leg_panels);
        let leg_positions: Vec<f64> = leg_rule.nodes.iter().map(|&t| (x_i + scn.v_max * t).min(x_f)).collect();
        let leg_snr = leg_positions.iter().map(|&x| scn.snrs(x)).collect();
        Some(Self {
            x_initial: x_i,
            x_final: x_f,
            horizon: scn.horizon,
            hover_time,
            hover_points: points,
            hover_step,
            hover_snr,
            leg_rule,
            leg_snr,
        })
    }
}

/// Clusters of hover points with positive dwell; points closer than 1.5 grid
/// steps merge.
pub(crate) fn count_hover_clusters(shf: &ShfTrajectory, step: f64) -> usize {
    let min_dwell = 1e-9 * shf.horizon;
    let pts: Vec<f64> = shf.active_hovers(min_dwell).into_iter().map(|(p, _)| p).collect();
    if pts.is_empty() {
        return 0;
    }
    1 + pts.windows(2).filter(|w| w[1] - w[0] > 1.5 * step + 1e-9).count()
}

/// Outcome of the time-sharing LP `max R s.t. base + sum_j tau_j c_j >= alpha R, sum tau = 1`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TimeShare {
    pub weights: Vec<f64>,
    pub rates: Vec<f64>,
    pub sum_rate: f64,
    /// Multipliers of the rate rows; sum(duals * alpha) == 1 at optimum.
    pub duals: Vec<f64>,
}

pub(crate) fn timeshare(columns: &[Vec<f64>], base: &[f64], alpha: &[f64]) -> Result<TimeShare> {
    let n = columns.len();
    let k = alpha.len();
    if n == 0 {
        return Err(Error::InvalidInput("time-sharing needs at least one column".into()));
    }
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = LpProblem::new(objective);
    for user in 0..k {
        let mut row: Vec<f64> = columns.iter().map(|c| -c[user]).collect();
        row.push(alpha[user]);
        lp.inequalities.push(LpRow::new(row, base[user]));
    }
    let mut ones = vec![1.0; n + 1];
    ones[n] = 0.0;
    lp.equalities.push(LpRow::new(ones, 1.0));
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::LpStatus(sol.status));
    }
    let mut weights: Vec<f64> = sol.x[..n].iter().map(|w| w.max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let rates: Vec<f64> = (0..k)
        .map(|user| base[user] + columns.iter().zip(&weights).map(|(c, w)| w * c[user]).sum::<f64>())
        .collect();
    let sum_rate = profile_rate(&rates, alpha);
    Ok(TimeShare { weights, rates, sum_rate, duals: sol.inequality_duals })
}

pub(crate) fn profile_rate(rates: &[f64], alpha: &[f64]) -> f64 {
    rates
        .iter()
        .zip(alpha)
        .filter(|(_, a)| **a > 0.0)
        .map(|(r, a)| r / a)
        .fold(f64::INFINITY, f64::min)
}

/// Best (smallest) dual value seen, with its multiplier.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DualBound {
    pub value: f64,
    pub dual: Vec<f64>,
}

impl DualBound {
    pub fn update(&mut self, value: f64, dual: &[f64]) {
        if value < self.value {
            self.value = value;
            self.dual = dual.to_vec();
        }
    }
}

/// Deduplicated columns for the time-sharing LP.
#[derive(Debug, Clone)]
pub(crate) struct ColumnPool<C> {
    pub keys: Vec<C>,
    pub columns: Vec<Vec<f64>>,
    seen: HashSet<C>,
}

impl<C: Hash + Eq + Clone> ColumnPool<C> {
    pub fn new() -> Self {
        Self { keys: Vec::new(), columns: Vec::new(), seen: HashSet::new() }
    }

    pub fn insert(&mut self, key: C, column: Vec<f64>) -> bool {
        if self.seen.contains(&key) {
            return false;
        }
        self.seen.insert(key.clone());
        self.keys.push(key);
        self.columns.push(column);
        true
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }
}

/// Alternate between the time-sharing LP over the pool and pricing at the LP
/// multipliers until the dual bound meets the primal value.
///
/// `price` returns the dual value at a normalized multiplier together with the
/// columns attaining it.
pub(crate) fn column_generation<C, F>(
    pool: &mut ColumnPool<C>,
    base: &[f64],
    alpha: &[f64],
    bound: &mut DualBound,
    settings: &SolverSettings,
    mut price: F,
) -> Result<(TimeShare, usize)>
where
    C: Hash + Eq + Clone,
    F: FnMut(&[f64]) -> Result<(f64, Vec<(C, Vec<f64>)>)>,
{
    let mut iterations = 0;
    loop {
        let share = timeshare(&pool.columns, base, alpha)?;
        if bound.value - share.sum_rate <= settings.polish_tol || iterations >= settings.max_polish_iterations {
            return Ok((share, iterations));
        }
        let Some(dual) = DualVector::normalized(&share.duals, alpha) else {
            return Ok((share, iterations));
        };
        iterations += 1;
        let (value, columns) = price(&dual.0)?;
        bound.update(value, &dual.0);
        if bound.value - share.sum_rate <= settings.polish_tol {
            return Ok((share, iterations));
        }
        let mut added = 0;
        for (key, column) in columns {
            if pool.insert(key, column) {
                added += 1;
            }
        }
        if added == 0 {
            return Ok((share, iterations));
        }
    }
}

/// Ellipsoid starting ball: center `1/(K+ alpha_k)` on users with positive
/// weight, radius reaching every vertex `e_k / alpha_k` of the feasible set.
pub(crate) fn initial_dual(alpha: &[f64]) -> (Vec<f64>, f64) {
    let positive = alpha.iter().filter(|a| **a > 0.0).count().max(1) as f64;
    let center: Vec<f64> = alpha.iter().map(|&a| if a > 0.0 { 1.0 / (positive * a) } else { 0.0 }).collect();
    let radius = (0..alpha.len())
        .filter(|&k| alpha[k] > 0.0)
        .map(|k| {
            center
                .iter()
                .enumerate()
                .map(|(j, c)| if j == k { 1.0 / alpha[k] - c } else { *c })
                .map(|d| d * d)
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    (center, 1.05 * radius + 1e-9)
}

/// Result of minimizing a dual function over `{lambda >= 0, sum lambda alpha = 1}`.
pub(crate) struct DualMinimum {
    pub dual: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes over the hyperplane `sum lambda alpha = 1` through an orthonormal
/// parametrization `lambda = lambda_0 + N z`, so the ellipsoid only sees the
/// sign constraints.
///
/// Returns `None` as soon as a dual value at or below `cutoff` is seen: the
/// cell cannot beat a solution of that rate.
pub(crate) fn minimize_dual<F>(
    alpha: &[f64],
    settings: &SolverSettings,
    cutoff: Option<f64>,
    mut eval: F,
) -> Result<Option<DualMinimum>>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let k = alpha.len();
    let (center, radius) = initial_dual(alpha);
    let basis = complement_basis(alpha);
    if basis.is_empty() {
        return Ok(Some(DualMinimum { dual: center, iterations: 0, converged: true }));
    }
    let lift = |z: &[f64]| -> Vec<f64> {
        let mut l = center.clone();
        for (n, zj) in basis.iter().zip(z) {
            for (li, ni) in l.iter_mut().zip(n) {
                *li += zj * ni;
            }
        }
        l
    };
    let constraints: Vec<Constraint<'_>> = (0..k)
        .map(|i| Constraint::linear(basis.iter().map(|n| -n[i]).collect(), center[i]))
        .collect();
    let mut objective = |z: &[f64], cutoff: Option<f64>| -> std::result::Result<(f64, Vec<f64>), Stop> {
        let (v, g) = eval(&lift(z)).map_err(Stop::Failed)?;
        if cutoff.is_some_and(|c| v <= c) {
            return Err(Stop::Cutoff);
        }
        Ok((v, basis.iter().map(|n| n.iter().zip(&g).map(|(a, b)| a * b).sum()).collect()))
    };
    let z0 = vec![0.0; basis.len()];
    let mut outcome = ellipsoid_minimize_below(
        |z: &[f64]| objective(z, cutoff),
        &constraints,
        &z0,
        radius,
        &settings.ellipsoid(),
        cutoff,
    );
    if matches!(outcome, Err(EllipsoidError::AboveTarget)) {
        // The cell beats the cutoff; minimize in full.
        outcome = ellipsoid_minimize(|z: &[f64]| objective(z, None), &constraints, &z0, radius, &settings.ellipsoid());
    }
    let (point, iterations, converged) = match outcome {
        Ok(out) => (out.point, out.iterations, true),
        Err(EllipsoidError::NotConverged { iterations, best: Some(best) }) => {
            log::warn!("ellipsoid stopped after {iterations} iterations; continuing from the best iterate");
            (best.point, iterations, false)
        }
        Err(EllipsoidError::NotConverged { iterations, best: None }) => {
            return Err(Error::Ellipsoid(format!("no feasible iterate in {iterations} iterations")))
        }
        Err(EllipsoidError::Infeasible) => return Err(Error::Ellipsoid("empty feasible set".into())),
        Err(EllipsoidError::AboveTarget) => unreachable!("the full minimization has no target"),
        Err(EllipsoidError::Oracle(Stop::Failed(e))) => return Err(e),
        Err(EllipsoidError::Oracle(Stop::Cutoff)) => return Ok(None),
    };
    let dual = DualVector::normalized(&lift(&point), alpha).map(|d| d.0).unwrap_or(center);
    Ok(Some(DualMinimum { dual, iterations, converged }))
}

enum Stop {
    Failed(Error),
    Cutoff,
}

/// Orthonormal basis of the complement of `alpha`.
fn complement_basis(alpha: &[f64]) -> Vec<Vec<f64>> {
    let k = alpha.len();
    let norm = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut basis: Vec<Vec<f64>> = vec![alpha.iter().map(|a| a / norm).collect()];
    for j in 0..k {
        if basis.len() == k {
            break;
        }
        let mut v = vec![0.0; k];
        v[j] = 1.0;
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= d * y;
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    basis.remove(0);
    basis
}

/// A per-scheme problem over endpoint cells.
pub(crate) trait CellProblem: Sync {
    type Open;
    type Solution: Send;

    /// `None` for infeasible cells.
    fn open(&self, x_i: f64, x_f: f64) -> Result<Option<Self::Open>>;
    /// Largest weighted instantaneous rate `max_r dual . r` at each location,
    /// given the SNRs there.
    fn envelope(&self, dual: &[f64], snrs: &[Vec<f64>]) -> Result<Vec<f64>>;
    /// Whether hovering is restricted to the user positions in cells with
    /// distinct endpoints.
    fn hovers_at_users(&self) -> bool {
        false
    }
    /// `None` when the cell provably cannot exceed `cutoff`.
    fn solve(&self, cell: Self::Open, cutoff: Option<f64>) -> Result<Option<Self::Solution>>;
    fn sum_rate(sol: &Self::Solution) -> f64;
    fn dual(sol: &Self::Solution) -> &[f64];
    fn diagnostics(sol: &mut Self::Solution) -> &mut SolveDiagnostics;
    fn endpoints(sol: &Self::Solution) -> (f64, f64);
    /// Coarsen the spacing below which hover points count as one location.
    fn widen_resolution(_sol: &mut Self::Solution, _step: f64) {}
    fn hover_locations(sol: &mut Self::Solution) -> &mut Vec<f64>;
}

/// Near-tie maximizers of the hover objective `max_r dual . r` over
/// `[lo, hi]`, one representative per cluster. With hovering restricted to
/// users every tied user position counts separately.
pub(crate) fn hover_locations<P: CellProblem>(
    problem: &P,
    dual: &[f64],
    lo: f64,
    hi: f64,
    scn: &Scenario,
    settings: &SolverSettings,
) -> Result<Vec<f64>> {
    if hi <= lo {
        return Ok(vec![lo]);
    }
    let users: Vec<f64> = scn.users_between(lo, hi).into_iter().map(|k| scn.layout.positions[k]).collect();
    if problem.hovers_at_users() {
        let snrs: Vec<Vec<f64>> = users.iter().map(|&x| scn.snrs(x)).collect();
        let values = problem.envelope(dual, &snrs)?;
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Ok(users.into_iter().zip(values).filter(|(_, v)| *v >= max - settings.near_tie_tol).map(|(x, _)| x).collect());
    }
    let mut xs = uniform_grid(lo, hi, (hi - lo) / settings.hover_divisions as f64);
    xs.extend(users);
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    let snrs: Vec<Vec<f64>> = xs.iter().map(|&x| scn.snrs(x)).collect();
    let values = problem.envelope(dual, &snrs)?;
    let (_, reps) = near_tie_clusters(&values, settings.near_tie_tol);
    Ok(reps.into_iter().map(|i| xs[i]).collect())
}

/// Locations per unit span of the envelope grid.
const ENVELOPE_DIVISIONS: usize = 4000;
/// Upper limit on the number of simplex probe multipliers.
const MAX_PROBES: usize = 64;

/// The envelope of one multiplier tabulated on the search grid.
struct EnvelopeTable {
    values: Vec<f64>,
    /// Trapezoid integral of `values` over position from the first node.
    cumulative: Vec<f64>,
    /// Covers discretization error of bounds read off the table.
    margin: f64,
}

/// Cheap upper bounds on cell dual values from tabulated envelopes.
struct Envelopes {
    xs: Vec<f64>,
    snrs: Vec<Vec<f64>>,
    /// Node index of each user.
    user_nodes: Vec<usize>,
    user_positions: Vec<f64>,
    horizon: f64,
    v_max: f64,
    at_users: bool,
    tables: Vec<EnvelopeTable>,
}

impl Envelopes {
    fn new<P: CellProblem>(problem: &P, scn: &Scenario, extra: &[f64]) -> Self {
        let (lo, hi) = scn.span();
        let mut xs = if hi > lo { uniform_grid(lo, hi, (hi - lo) / ENVELOPE_DIVISIONS as f64) } else { vec![lo] };
        xs.extend(scn.layout.positions.iter().copied());
        xs.extend(extra.iter().copied());
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
        let snrs = xs.iter().map(|&x| scn.snrs(x)).collect();
        let user_positions = scn.layout.positions.clone();
        let user_nodes = user_positions.iter().map(|&w| nearest(&xs, w)).collect();
        Self {
            xs,
            snrs,
            user_nodes,
            user_positions,
            horizon: scn.horizon,
            v_max: scn.v_max,
            at_users: problem.hovers_at_users(),
            tables: Vec::new(),
        }
    }

    fn table<P: CellProblem>(&self, problem: &P, dual: &[f64]) -> Result<EnvelopeTable> {
        let values = problem.envelope(dual, &self.snrs)?;
        let mut cumulative = vec![0.0; values.len()];
        for i in 1..values.len() {
            cumulative[i] = cumulative[i - 1] + 0.5 * (self.xs[i] - self.xs[i - 1]) * (values[i] + values[i - 1]);
        }
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let curvature = values.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]).abs()).fold(0.0, f64::max);
        Ok(EnvelopeTable { values, cumulative, margin: curvature + 1e-12 * scale })
    }

    fn add<P: CellProblem>(&mut self, problem: &P, duals: &[Vec<f64>]) -> Result<()> {
        let tables: Vec<EnvelopeTable> =
            duals.par_iter().map(|d| self.table(problem, d)).collect::<Result<Vec<_>>>()?;
        self.tables.extend(tables);
        Ok(())
    }

    /// Linear interpolation of `f` at `x`.
    fn at(&self, f: &[f64], x: f64) -> f64 {
        let i = self.xs.partition_point(|&v| v < x);
        if i < self.xs.len() && (self.xs[i] - x).abs() <= 1e-9 {
            return f[i];
        }
        if i == 0 {
            return f[0];
        }
        if i == self.xs.len() {
            return f[i - 1];
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        f[i - 1] + (f[i] - f[i - 1]) * (x - x0) / (x1 - x0)
    }

    fn bound_with(&self, t: &EnvelopeTable, a: f64, b: f64) -> f64 {
        let flight = if b > a { (b - a) / self.v_max } else { 0.0 };
        let hover_time = (self.horizon - flight).max(0.0);
        let leg = if b > a { (self.at(&t.cumulative, b) - self.at(&t.cumulative, a)) / self.v_max } else { 0.0 };
        let hover = if hover_time <= 0.0 {
            0.0
        } else if self.at_users && b > a {
            self.user_positions
                .iter()
                .zip(&self.user_nodes)
                .filter(|(w, _)| **w >= a && **w <= b)
                .map(|(_, &n)| t.values[n])
                .fold(0.0, f64::max)
        } else {
            let i0 = self.xs.partition_point(|&v| v < a - 1e-9);
            let i1 = self.xs.partition_point(|&v| v <= b + 1e-9);
            t.values[i0..i1]
                .iter()
                .copied()
                .fold(self.at(&t.values, a).max(self.at(&t.values, b)), f64::max)
        };
        (leg + hover_time * hover) / self.horizon + t.margin
    }

    fn bound(&self, a: f64, b: f64, from: usize) -> f64 {
        self.tables[from..].iter().map(|t| self.bound_with(t, a, b)).fold(f64::INFINITY, f64::min)
    }
}

fn nearest(xs: &[f64], x: f64) -> usize {
    let i = xs.partition_point(|&v| v < x);
    if i == xs.len() || (i > 0 && (x - xs[i - 1]) < (xs[i] - x)) {
        i - 1
    } else {
        i
    }
}

/// Multipliers spread over `{lambda >= 0, sum lambda alpha = 1}`: a simplex
/// lattice in `theta_k = alpha_k lambda_k` plus the center.
fn probe_duals(alpha: &[f64]) -> Vec<Vec<f64>> {
    let active: Vec<usize> = (0..alpha.len()).filter(|&k| alpha[k] > 0.0).collect();
    let m = active.len();
    let mut probes = vec![initial_dual(alpha).0];
    if m < 2 {
        return probes;
    }
    let count = |n: usize| -> usize {
        // C(n + m - 1, m - 1)
        (1..m).fold(1usize, |acc, i| acc * (n + i) / i)
    };
    let mut n = 1;
    while count(n + 1) <= MAX_PROBES {
        n += 1;
    }
    let mut parts = vec![0usize; m];
    fn fill(k: usize, left: usize, parts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k + 1 == parts.len() {
            parts[k] = left;
            out.push(parts.clone());
            return;
        }
        for v in 0..=left {
            parts[k] = v;
            fill(k + 1, left - v, parts, out);
        }
    }
    let mut lattice = Vec::new();
    fill(0, n, &mut parts, &mut lattice);
    for p in lattice {
        let mut l = vec![0.0; alpha.len()];
        for (j, &k) in active.iter().enumerate() {
            l[k] = p[j] as f64 / n as f64 / alpha[k];
        }
        probes.push(l);
    }
    probes
}

/// Exhaustive search over endpoint pairs with dual-bound pruning: a cell is
/// solved only if its dual value at every known multiplier exceeds the best
/// primal value found so far.
pub(crate) fn search_endpoints<P: CellProblem>(
    problem: &P,
    scn: &Scenario,
    settings: &SolverSettings,
    alpha: &RateProfile,
) -> Result<P::Solution> {
    let (lo, hi) = scn.span();
    let users = &scn.layout.positions;
    let with_users = |mut pts: Vec<f64>| {
        if settings.user_endpoints {
            pts.extend(users.iter().copied());
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
        pts
    };
    let reach = scn.v_max * scn.horizon;
    let mut stats = (0, 0);
    if reach <= 0.0 || hi <= lo {
        let step = (hi - lo) / settings.static_divisions as f64;
        let points = with_users(uniform_grid(lo, hi, step));
        let cells: Vec<(f64, f64)> = points.iter().map(|&x| (x, x)).collect();
        let mut env = Envelopes::new(problem, scn, &points);
        env.add(problem, &probe_duals(alpha.as_slice()))?;
        let mut best = run_cells(problem, &cells, None, &mut env, &mut stats)?.ok_or(Error::NoFeasibleCell)?;
        record::<P>(&mut best, stats);
        P::widen_resolution(&mut best, step);
        *P::hover_locations(&mut best) = hover_locations(problem, P::dual(&best), lo, hi, scn, settings)?;
        return Ok(best);
    }
    let step = (hi - lo) / (settings.endpoint_grid - 1) as f64;
    let points = with_users(uniform_grid(lo, hi, step));
    let mut cells = Vec::new();
    for (i, &a) in points.iter().enumerate() {
        for &b in &points[i..] {
            if scn.is_reachable(a, b) {
                cells.push((a, b));
            }
        }
    }
    let mut env = Envelopes::new(problem, scn, &points);
    env.add(problem, &probe_duals(alpha.as_slice()))?;
    let mut best = run_cells(problem, &cells, None, &mut env, &mut stats)?.ok_or(Error::NoFeasibleCell)?;
    if settings.endpoint_refine {
        let (bi, bf) = P::endpoints(&best);
        let fine = step / 4.0;
        let around = |c: f64| -> Vec<f64> {
            (-4..=4).map(|j| (c + fine * j as f64).clamp(lo, hi)).collect()
        };
        let known: HashSet<(u64, u64)> = cells.iter().map(|(a, b)| (a.to_bits(), b.to_bits())).collect();
        let mut local = Vec::new();
        let mut seen = HashSet::new();
        for a in around(bi) {
            for b in around(bf) {
                let key = (a.to_bits(), b.to_bits());
                if scn.is_reachable(a, b) && !known.contains(&key) && seen.insert(key) {
                    local.push((a, b));
                }
            }
        }
        best = run_cells(problem, &local, Some(best), &mut env, &mut stats)?
            .expect("incumbent is carried through the refinement");
    }
    record::<P>(&mut best, stats);
    P::widen_resolution(&mut best, if settings.endpoint_refine { step / 4.0 } else { step });
    *P::hover_locations(&mut best) = hover_locations(problem, P::dual(&best), lo, hi, scn, settings)?;
    Ok(best)
}

fn record<P: CellProblem>(sol: &mut P::Solution, stats: (usize, usize)) {
    let d = P::diagnostics(sol);
    d.cells_solved = stats.0;
    d.cells_pruned = stats.1;
}

fn run_cells<P: CellProblem>(
    problem: &P,
    cells: &[(f64, f64)],
    incumbent: Option<P::Solution>,
    env: &mut Envelopes,
    stats: &mut (usize, usize),
) -> Result<Option<P::Solution>> {
    let mut bounds: Vec<f64> = cells.iter().map(|&(a, b)| env.bound(a, b, 0)).collect();
    let mut open: Vec<bool> = cells.iter().map(|_| true).collect();
    let mut best = incumbent;
    let mut first_error = None;
    loop {
        let next = (0..cells.len())
            .filter(|&i| open[i])
            .max_by(|&i, &j| bounds[i].total_cmp(&bounds[j]).then(j.cmp(&i)));
        let Some(idx) = next else { break };
        let incumbent_rate = best.as_ref().map(P::sum_rate);
        if incumbent_rate.is_some_and(|r| bounds[idx] <= r) {
            stats.1 += open.iter().filter(|o| **o).count();
            break;
        }
        open[idx] = false;
        let (a, b) = cells[idx];
        let Some(cell) = problem.open(a, b)? else { continue };
        let res = problem.solve(cell, incumbent_rate);
        match res {
            Ok(None) => stats.1 += 1,
            Ok(Some(sol)) => {
                stats.0 += 1;
                let from = env.tables.len();
                env.add(problem, &[P::dual(&sol).to_vec()])?;
                for (i, &(a, b)) in cells.iter().enumerate() {
                    if open[i] {
                        bounds[i] = bounds[i].min(env.bound(a, b, from));
                    }
                }
                if incumbent_rate.is_none_or(|r| P::sum_rate(&sol) > r) {
                    best = Some(sol);
                }
            }
            Err(e) => {
                log::warn!("cell ({a}, {b}) failed: {e}");
                first_error.get_or_insert(e);
            }
        }
    }
    match (best, first_error) {
        (None, Some(e)) => Err(e),
        (best, _) => Ok(best),
    }
}
