//! Capacity region under NOMA with successive interference cancellation.

use std::collections::HashMap;
use std::f64::consts::LN_2;

use serde::Serialize;

use crate::dual::{
    column_generation, count_hover_clusters, hover_locations, minimize_dual, search_endpoints, timeshare, Cell, CellProblem, ColumnPool, DualBound,
    HoverSet, SolveDiagnostics,
};
use crate::error::{Error, Result};
use crate::numerics::{near_tie_clusters, SimpsonRule};
use crate::scenario::{DualVector, RateProfile, RateTuple, Scenario, SolverSettings};
use crate::trajectory::{assemble_shf, integrate_pieces, LinearPiece, MaxSpeedLeg, PhaseKind, ShfTrajectory, SpeedFreeSchedule};

/// SIC decoding order: users listed so that the first entry is decoded last
/// and sees no interference.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct DecodingOrder(Vec<usize>);

impl DecodingOrder {
    pub fn new(users: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; users.len()];
        for &u in &users {
            if u >= users.len() || seen[u] {
                return Err(Error::InvalidInput(format!("{users:?} is not a permutation")));
            }
            seen[u] = true;
        }
        Ok(Self(users))
    }

    /// Users sorted by decreasing weight, ties toward the lower index.
    pub fn descending(dual: &[f64]) -> Self {
        let mut users: Vec<usize> = (0..dual.len()).collect();
        users.sort_by(|&a, &b| dual[b].total_cmp(&dual[a]).then(a.cmp(&b)));
        Self(users)
    }

    pub fn users(&self) -> &[usize] {
        &self.0
    }
}

/// `log2(1 + sum_{k in subset} snr_k(x))`.
pub fn subset_sum_rate(x: f64, subset: &[usize], scn: &Scenario) -> f64 {
    let total: f64 = subset.iter().map(|&k| scn.snr(k, x)).sum();
    total.ln_1p() / LN_2
}

/// `levels[k] = log2(1 + sum_{i <= k} snr_{order(i)})`.
fn fill_levels(snr: &[f64], order: &[usize], levels: &mut [f64]) {
    let mut acc = 0.0;
    for (k, &u) in order.iter().enumerate() {
        acc += snr[u];
        levels[k] = acc.ln_1p() / LN_2;
    }
}

fn fill_vertex(levels: &[f64], order: &[usize], rates: &mut [f64]) {
    let mut prev = 0.0;
    for (k, &u) in order.iter().enumerate() {
        rates[u] = levels[k] - prev;
        prev = levels[k];
    }
}

/// Instantaneous vertex rates with the UAV at `x`.
pub fn instantaneous_vertex_rates(order: &DecodingOrder, x: f64, scn: &Scenario) -> Vec<f64> {
    let k = scn.num_users();
    let snr = scn.snrs(x);
    let mut levels = vec![0.0; k];
    let mut rates = vec![0.0; k];
    fill_levels(&snr, order.users(), &mut levels);
    fill_vertex(&levels, order.users(), &mut rates);
    rates
}

/// Average vertex rates over a maximum-speed leg followed by hovering.
pub fn vertex_rates(
    order: &DecodingOrder,
    leg: &MaxSpeedLeg,
    hovers: &SpeedFreeSchedule,
    scn: &Scenario,
    panels: usize,
) -> Result<RateTuple> {
    let total = leg.duration + hovers.total;
    if (total - scn.horizon).abs() > 1e-9 * scn.horizon.max(1.0) {
        return Err(crate::trajectory::TrajectoryError::DurationMismatch { expected: scn.horizon, actual: total }.into());
    }
    let k = scn.num_users();
    let mut out = vec![0.0; k];
    let rule = SimpsonRule::new(0.0, leg.duration, panels);
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let r = instantaneous_vertex_rates(order, leg.position(t), scn);
        for (o, v) in out.iter_mut().zip(&r) {
            *o += w * v;
        }
    }
    for (&x, &d) in hovers.hover_points.iter().zip(&hovers.hover_durations) {
        let r = instantaneous_vertex_rates(order, x, scn);
        for (o, v) in out.iter_mut().zip(&r) {
            *o += d * v;
        }
    }
    Ok(RateTuple(out.into_iter().map(|v| v / scn.horizon).collect()))
}

fn check_descending(dual: &[f64], order: &DecodingOrder, tie_tol: f64) -> Result<()> {
    let max = dual.iter().copied().fold(0.0, f64::max);
    for w in order.users().windows(2) {
        if dual[w[1]] > dual[w[0]] + tie_tol * max {
            return Err(Error::InvalidInput(format!(
                "order {:?} does not sort the dual {dual:?} in decreasing order",
                order.users()
            )));
        }
    }
    Ok(())
}

/// Hover objective `psi(x) = sum_k (lambda_pi(k) - lambda_pi(k+1)) / T * levels_k(x)`.
pub fn psi_objective(x: f64, dual: &DualVector, order: &DecodingOrder, scn: &Scenario) -> Result<f64> {
    let lambda = dual.weights();
    if lambda.len() != scn.num_users() || order.users().len() != lambda.len() {
        return Err(Error::InvalidInput("dual/order length differs from the number of users".into()));
    }
    check_descending(lambda, order, 1e-4)?;
    let snr = scn.snrs(x);
    let mut levels = vec![0.0; lambda.len()];
    fill_levels(&snr, order.users(), &mut levels);
    Ok(weighted_levels(lambda, order.users(), &levels) / scn.horizon)
}

fn weighted_levels(lambda: &[f64], order: &[usize], levels: &[f64]) -> f64 {
    let k = order.len();
    (0..k)
        .map(|i| {
            let next = if i + 1 < k { lambda[order[i + 1]] } else { 0.0 };
            (lambda[order[i]] - next) * levels[i]
        })
        .sum()
}

/// Decoding orders compatible with a dual vector: the descending order, with
/// each group of tied weights either rotated cyclically (one order per group
/// member) or, with `all_permutations`, fully permuted.
pub fn enumerate_orders(dual: &[f64], tie_tol: f64, all_permutations: bool) -> Vec<DecodingOrder> {
    let sorted = DecodingOrder::descending(dual).0;
    let max = dual.iter().copied().fold(0.0, f64::max);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &u in &sorted {
        match groups.last_mut() {
            Some(g) if dual[*g.last().expect("non-empty")] - dual[u] <= tie_tol * max => g.push(u),
            _ => groups.push(vec![u]),
        }
    }
    let variants: Vec<Vec<Vec<usize>>> = groups
        .into_iter()
        .map(|mut g| {
            g.sort_unstable();
            if all_permutations {
                permutations(&g)
            } else {
                (0..g.len()).map(|r| g[r..].iter().chain(&g[..r]).copied().collect()).collect()
            }
        })
        .collect();
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for group in &variants {
        let mut next = Vec::with_capacity(out.len() * group.len());
        for prefix in &out {
            for v in group {
                let mut o = prefix.clone();
                o.extend_from_slice(v);
                next.push(o);
            }
        }
        out = next;
    }
    out.into_iter().map(DecodingOrder).collect()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Time-sharing LP over rate tuples: weights `tau` and the largest `R` with
/// `sum_j tau_j r_j >= alpha R`.
pub fn timeshare_lp(tuples: &[RateTuple], alpha: &RateProfile) -> Result<(Vec<f64>, f64)> {
    let columns: Vec<Vec<f64>> = tuples.iter().map(|t| t.0.clone()).collect();
    let zero = vec![0.0; alpha.len()];
    let share = timeshare(&columns, &zero, alpha.as_slice())?;
    Ok((share.weights, share.sum_rate))
}

/// Dual function value at one multiplier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NomaDualEvaluation {
    pub value: f64,
    /// Rate tuple attaining the value; a subgradient of the dual function.
    pub subgradient: RateTuple,
    /// Near-tie maximizers of the hover objective.
    pub maximizers: Vec<f64>,
    pub order: DecodingOrder,
}

struct OrderTables {
    /// Leg integral of the vertex rates, per user.
    leg: Vec<f64>,
    /// `[point][k]` cumulative levels.
    levels: Vec<Vec<f64>>,
    /// `[point][user]` instantaneous vertex rates.
    hover: Vec<Vec<f64>>,
}

pub(crate) struct NomaCell<'a> {
    settings: &'a SolverSettings,
    alpha: &'a [f64],
    cell: Cell,
    tables: HashMap<DecodingOrder, OrderTables>,
}

type Column = (usize, DecodingOrder);

impl<'a> NomaCell<'a> {
    pub fn open(
        scn: &Scenario,
        settings: &'a SolverSettings,
        alpha: &'a [f64],
        x_i: f64,
        x_f: f64,
    ) -> Option<Self> {
        Cell::open(scn, settings, x_i, x_f, HoverSet::Grid).map(|cell| Self {
            settings,
            alpha,
            cell,
            tables: HashMap::new(),
        })
    }

    fn tables(&mut self, order: &DecodingOrder) -> &OrderTables {
        let cell = &self.cell;
        self.tables.entry(order.clone()).or_insert_with(|| {
            let k = order.users().len();
            let mut levels = vec![0.0; k];
            let mut rates = vec![0.0; k];
            let mut leg = vec![0.0; k];
            for (snr, w) in cell.leg_snr.iter().zip(&cell.leg_rule.weights) {
                fill_levels(snr, order.users(), &mut levels);
                fill_vertex(&levels, order.users(), &mut rates);
                for (l, r) in leg.iter_mut().zip(&rates) {
                    *l += w * r;
                }
            }
            let mut all_levels = Vec::with_capacity(cell.hover_points.len());
            let mut hover = Vec::with_capacity(cell.hover_points.len());
            for snr in &cell.hover_snr {
                fill_levels(snr, order.users(), &mut levels);
                fill_vertex(&levels, order.users(), &mut rates);
                all_levels.push(levels.clone());
                hover.push(rates.clone());
            }
            OrderTables { leg, levels: all_levels, hover }
        })
    }

    fn column(&mut self, point: usize, order: &DecodingOrder) -> Vec<f64> {
        let (t, th) = (self.cell.horizon, self.cell.hover_time);
        let tab = self.tables(order);
        tab.leg.iter().zip(&tab.hover[point]).map(|(l, h)| (l + th * h) / t).collect()
    }

    /// Dual value, subgradient and hover maximizers (indices).
    fn evaluate(&mut self, lambda: &[f64]) -> (NomaDualEvaluation, Vec<usize>) {
        let order = DecodingOrder::descending(lambda);
        let tol = self.settings.near_tie_tol;
        let (t, th) = (self.cell.horizon, self.cell.hover_time);
        let tab = self.tables(&order);
        let psi: Vec<f64> = tab.levels.iter().map(|l| weighted_levels(lambda, order.users(), l)).collect();
        let (best, reps) = near_tie_clusters(&psi, tol);
        let p = reps[0];
        let rates: Vec<f64> = tab.leg.iter().zip(&tab.hover[p]).map(|(l, h)| (l + th * h) / t).collect();
        let leg_value: f64 = lambda.iter().zip(&tab.leg).map(|(a, b)| a * b).sum();
        let value = (leg_value + th * best) / t;
        let maximizers = reps.iter().map(|&i| self.cell.hover_points[i]).collect();
        (NomaDualEvaluation { value, subgradient: RateTuple(rates), maximizers, order }, reps)
    }

    fn price(&mut self, lambda: &[f64]) -> (f64, Vec<(Column, Vec<f64>)>) {
        let (eval, reps) = self.evaluate(lambda);
        let orders = enumerate_orders(lambda, self.settings.order_tie_tol, self.settings.all_permutations);
        let mut cols = Vec::new();
        for &p in &reps {
            for o in &orders {
                cols.push(((p, o.clone()), self.column(p, o)));
            }
        }
        (eval.value, cols)
    }

    pub fn solve(mut self, scn: &Scenario, cutoff: Option<f64>) -> Result<Option<NomaSolution>> {
        let alpha = self.alpha;
        let settings = self.settings;
        let Some(min) = minimize_dual(alpha, settings, cutoff, |l| {
            let (e, _) = self.evaluate(l);
            Ok((e.value, e.subgradient.0))
        })? else {
            return Ok(None);
        };
        let mut pool: ColumnPool<Column> = ColumnPool::new();
        let (value, cols) = self.price(&min.dual);
        for (key, col) in cols {
            pool.insert(key, col);
        }
        let mut bound = DualBound { value, dual: min.dual.clone() };
        let zero = vec![0.0; alpha.len()];
        let (share, polish) =
            column_generation(&mut pool, &zero, alpha, &mut bound, settings, |l| Ok(self.price(l)))?;

        let mut points: Vec<usize> = Vec::new();
        let mut orders: Vec<DecodingOrder> = Vec::new();
        let mut used = Vec::new();
        for (j, &w) in share.weights.iter().enumerate() {
            if w > 0.0 {
                let (p, o) = &pool.keys[j];
                if !points.contains(p) {
                    points.push(*p);
                }
                if !orders.contains(o) {
                    orders.push(o.clone());
                }
                used.push((*p, o.clone(), w));
            }
        }
        points.sort_unstable();
        orders.sort();
        let mut entries = Vec::with_capacity(used.len());
        for (p, o, w) in used {
            let hover_rates = RateTuple(self.tables(&o).hover[p].clone());
            entries.push(TimeShareEntry {
                hover_index: points.binary_search(&p).expect("point recorded"),
                order_index: orders.binary_search(&o).expect("order recorded"),
                hover_rates,
                weight: w,
            });
        }
        let hover_points: Vec<f64> = points.iter().map(|&p| self.cell.hover_points[p]).collect();
        let durations: Vec<f64> = (0..points.len())
            .map(|h| {
                self.cell.hover_time * entries.iter().filter(|e| e.hover_index == h).map(|e| e.weight).sum::<f64>()
            })
            .collect();
        let shf = assemble_shf(
            self.cell.x_initial,
            self.cell.x_final,
            hover_points.clone(),
            durations,
            scn.v_max,
            scn.horizon,
        )?;
        let diagnostics = SolveDiagnostics {
            ellipsoid_iterations: min.iterations,
            ellipsoid_converged: min.converged,
            polish_iterations: polish,
            columns: pool.len(),
            ..Default::default()
        };
        let gap = bound.value - share.sum_rate;
        if gap > settings.gap_tol {
            log::warn!("NOMA duality gap {gap:e} exceeds {:e}", settings.gap_tol);
        }
        Ok(Some(NomaSolution {
            hover_locations: Vec::new(),
            shf,
            hover_set: HoverSolutionSet { hover_points, decoding_orders: orders, entries },
            hover_grid_step: self.cell.hover_step,
            rates: RateTuple(share.rates),
            sum_rate: share.sum_rate,
            dual: DualVector(bound.dual),
            dual_value: bound.value,
            diagnostics,
        }))
    }
}

/// One time-shared (hover point, decoding order) pair. The order is used for
/// a `weight` share of both the hover time and the flight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeShareEntry {
    pub hover_index: usize,
    pub order_index: usize,
    /// Instantaneous vertex rates at the hover point.
    pub hover_rates: RateTuple,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoverSolutionSet {
    pub hover_points: Vec<f64>,
    pub decoding_orders: Vec<DecodingOrder>,
    pub entries: Vec<TimeShareEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NomaSolution {
    pub shf: ShfTrajectory,
    /// Clustered near-tie maximizers of the hover objective at `dual`: the
    /// candidate hover set the time-sharing chooses from.
    pub hover_locations: Vec<f64>,
    pub hover_set: HoverSolutionSet,
    /// Hover points closer than 1.5 times this spacing count as one location.
    pub hover_grid_step: f64,
    pub rates: RateTuple,
    pub sum_rate: f64,
    pub dual: DualVector,
    pub dual_value: f64,
    pub diagnostics: SolveDiagnostics,
}

impl NomaSolution {
    pub fn duality_gap(&self) -> f64 {
        self.dual_value - self.sum_rate
    }

    /// Share of the flight spent under each decoding order.
    pub fn flight_order_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.hover_set.decoding_orders.len()];
        for e in &self.hover_set.entries {
            w[e.order_index] += e.weight;
        }
        w
    }

    /// Size of the candidate hover set.
    pub fn hover_count(&self) -> usize {
        self.hover_locations.len()
    }

    /// Number of distinct hover locations with positive dwell time; points
    /// on adjacent grid nodes count once.
    pub fn dwell_count(&self) -> usize {
        count_hover_clusters(&self.shf, self.hover_grid_step)
    }

    /// Average rates recomputed from the emitted trajectory and schedule.
    pub fn recompute_rates(&self, scn: &Scenario, panels: usize) -> RateTuple {
        let k = scn.num_users();
        let orders = &self.hover_set.decoding_orders;
        let flight_weights = self.flight_order_weights();
        let mut out = vec![0.0; k];
        for phase in self.shf.phases() {
            let d = phase.t_end - phase.t_start;
            match phase.kind {
                PhaseKind::Flight { x_from, x_to } => {
                    let piece = [LinearPiece { duration: d, x_from, x_to }];
                    for (o, &w) in orders.iter().zip(&flight_weights) {
                        if w == 0.0 {
                            continue;
                        }
                        for (u, acc) in out.iter_mut().enumerate() {
                            *acc += w * integrate_pieces(&piece, |x| instantaneous_vertex_rates(o, x, scn)[u], panels);
                        }
                    }
                }
                PhaseKind::Hover { index, x } => {
                    let mix: Vec<&TimeShareEntry> =
                        self.hover_set.entries.iter().filter(|e| e.hover_index == index).collect();
                    let total: f64 = mix.iter().map(|e| e.weight).sum();
                    for e in mix {
                        let r = instantaneous_vertex_rates(&orders[e.order_index], x, scn);
                        for (acc, v) in out.iter_mut().zip(&r) {
                            *acc += d * e.weight / total * v;
                        }
                    }
                }
            }
        }
        RateTuple(out.into_iter().map(|v| v / scn.horizon).collect())
    }
}

/// Dual value, subgradient and maximizers for the endpoint pair `(x_i, x_f)`.
pub fn evaluate_dual(
    dual: &DualVector,
    x_i: f64,
    x_f: f64,
    scn: &Scenario,
    settings: &SolverSettings,
) -> Result<NomaDualEvaluation> {
    let alpha = vec![0.0; scn.num_users()];
    let mut cell = NomaCell::open(scn, settings, &alpha, x_i, x_f).ok_or(Error::InfeasibleHorizon {
        flight_time: scn.flight_time(x_i, x_f),
        horizon: scn.horizon,
    })?;
    Ok(cell.evaluate(dual.weights()).0)
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

/// Optimal NOMA trajectory and decoding-order time-sharing for fixed endpoints.
pub fn solve_p1_fixed_endpoints(
    x_i: f64,
    x_f: f64,
    alpha: &RateProfile,
    scn: &Scenario,
    settings: &SolverSettings,
) -> Result<NomaSolution> {
    check_inputs(alpha, scn, settings)?;
    let (lo, hi) = scn.span();
    if x_i < lo || x_f > hi || x_i > x_f {
        return Err(Error::InvalidInput(format!("endpoints ({x_i}, {x_f}) outside [{lo}, {hi}] or reversed")));
    }
    let cell = NomaCell::open(scn, settings, alpha.as_slice(), x_i, x_f).ok_or(Error::InfeasibleHorizon {
        flight_time: scn.flight_time(x_i, x_f),
        horizon: scn.horizon,
    })?;
    let mut sol = cell.solve(scn, None)?.expect("no cutoff");
    let problem = NomaProblem { scn, settings, alpha: alpha.as_slice() };
    sol.hover_locations = hover_locations(&problem, sol.dual.weights(), x_i, x_f, scn, settings)?;
    Ok(sol)
}

struct NomaProblem<'a> {
    scn: &'a Scenario,
    settings: &'a SolverSettings,
    alpha: &'a [f64],
}

impl<'a> CellProblem for NomaProblem<'a> {
    type Open = NomaCell<'a>;
    type Solution = NomaSolution;

    fn open(&self, x_i: f64, x_f: f64) -> Result<Option<Self::Open>> {
        Ok(NomaCell::open(self.scn, self.settings, self.alpha, x_i, x_f))
    }

    fn envelope(&self, dual: &[f64], snrs: &[Vec<f64>]) -> Result<Vec<f64>> {
        let order = DecodingOrder::descending(dual);
        let mut levels = vec![0.0; dual.len()];
        Ok(snrs
            .iter()
            .map(|snr| {
                fill_levels(snr, order.users(), &mut levels);
                weighted_levels(dual, order.users(), &levels)
            })
            .collect())
    }

    fn solve(&self, cell: Self::Open, cutoff: Option<f64>) -> Result<Option<NomaSolution>> {
        cell.solve(self.scn, cutoff)
    }

    fn sum_rate(sol: &NomaSolution) -> f64 {
        sol.sum_rate
    }

    fn dual(sol: &NomaSolution) -> &[f64] {
        sol.dual.weights()
    }

    fn diagnostics(sol: &mut NomaSolution) -> &mut SolveDiagnostics {
        &mut sol.diagnostics
    }

    fn endpoints(sol: &NomaSolution) -> (f64, f64) {
        (sol.shf.x_initial, sol.shf.x_final)
    }

    fn hover_locations(sol: &mut NomaSolution) -> &mut Vec<f64> {
        &mut sol.hover_locations
    }

    fn widen_resolution(sol: &mut NomaSolution, step: f64) {
        sol.hover_grid_step = sol.hover_grid_step.max(step);
    }
}

/// Pareto-boundary point of the NOMA capacity region in direction `alpha`.
pub fn solve_p1(alpha: &RateProfile, scn: &Scenario, settings: &SolverSettings) -> Result<NomaSolution> {
    check_inputs(alpha, scn, settings)?;
    let problem = NomaProblem { scn, settings, alpha: alpha.as_slice() };
    search_endpoints(&problem, scn, settings, alpha)
}
