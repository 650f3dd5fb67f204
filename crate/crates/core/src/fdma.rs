//! Capacity region under FDMA with per-location optimal bandwidth splitting.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::dual::{
    column_generation, count_hover_clusters, hover_locations, minimize_dual, search_endpoints, timeshare, Cell, CellProblem,
    ColumnPool, DualBound, HoverSet, SolveDiagnostics,
};
use crate::error::{Error, Result};
use crate::numerics::{lambert_w0, near_tie_clusters, BRANCH_POINT};
use crate::scenario::{DualVector, RateProfile, RateTuple, Scenario, SolverSettings};
use crate::trajectory::{assemble_shf, integrate_pieces, LinearPiece, PhaseKind, ShfTrajectory};

/// Bandwidth split at one location.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandwidthAllocation {
    pub fractions: Vec<f64>,
    /// Multiplier of the unit-bandwidth constraint.
    pub eta: f64,
}

/// `b log2(1 + snr / b)`, zero at `b = 0`.
fn split_rate(b: f64, snr: f64) -> f64 {
    if b <= 0.0 {
        return 0.0;
    }
    let ratio = snr / b;
    if ratio.is_finite() {
        b * ratio.ln_1p() / LN_2
    } else {
        // Subnormal `b`: the ratio overflows but the rate vanishes.
        b * (snr.ln() - b.ln()) / LN_2
    }
}

/// Rate of `user` with bandwidth fraction `b` and the UAV at `x`.
pub fn user_rate_fdma(b: f64, x: f64, user: usize, scn: &Scenario) -> f64 {
    split_rate(b, scn.snr(user, x))
}

/// `phi(c) = -W/(1 + W)` with `W = W0(-exp(-(c + 1)))`, and its derivative
/// `-phi (1 + phi)^2`.
fn phi(c: f64) -> (f64, f64) {
    let arg = (-(-(c + 1.0)).exp()).max(BRANCH_POINT + 1e-15);
    let w = lambert_w0(arg).expect("argument clamped into the principal branch");
    let p = -w / (1.0 + w);
    (p, -p * (1.0 + p) * (1.0 + p))
}

/// Optimal split for weights `mu` and SNRs `snr`. `scaled_eta` is the
/// multiplier times `T ln 2`; `warm` seeds the root search.
pub(crate) fn split(mu: &[f64], snr: &[f64], warm: Option<f64>) -> Result<(Vec<f64>, f64)> {
    let active: Vec<usize> = (0..mu.len()).filter(|&k| mu[k] > 0.0).collect();
    let mut b = vec![0.0; mu.len()];
    match active.len() {
        0 => return Err(Error::Allocation(format!("no user has a positive weight in {mu:?}"))),
        1 => {
            b[active[0]] = 1.0;
            let k = active[0];
            // Marginal value of bandwidth for the sole user.
            let u = snr[k];
            let slope = mu[k] * ((u).ln_1p() - u / (1.0 + u));
            return Ok((b, slope.max(0.0)));
        }
        _ => {}
    }
    let excess = |e: f64| -> (f64, f64) {
        let mut f = -1.0;
        let mut df = 0.0;
        for &k in &active {
            let (p, dp) = phi(e / mu[k]);
            f += snr[k] * p;
            df += snr[k] * dp / mu[k];
        }
        (f, df)
    };
    let max_mu = active.iter().map(|&k| mu[k]).fold(0.0, f64::max);
    let start = warm.filter(|w| w.is_finite() && *w > 0.0).unwrap_or(10.0 * max_mu);
    let eta = solve_excess(excess, start).ok_or_else(|| {
        Error::Allocation(format!("no multiplier balances weights {mu:?} and SNRs {snr:?}"))
    })?;
    for &k in &active {
        b[k] = snr[k] * phi(eta / mu[k]).0;
    }
    let total: f64 = b.iter().sum();
    if !((total - 1.0).abs() <= 1e-9) {
        return Err(Error::Allocation(format!("fractions sum to {total}")));
    }
    for v in &mut b {
        *v /= total;
    }
    Ok((b, eta))
}

/// Root of the decreasing, convex `excess`, by Newton steps from `start`.
/// Steps that leave the known sign-change bracket fall back to doubling,
/// halving or bisection.
fn solve_excess<F: Fn(f64) -> (f64, f64)>(excess: F, start: f64) -> Option<f64> {
    let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);
    let mut x = start;
    for _ in 0..400 {
        let (f, df) = excess(x);
        if f.is_nan() {
            return None;
        }
        if f.abs() <= 1e-13 {
            return Some(x);
        }
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi.is_finite() && hi - lo <= 4.0 * f64::EPSILON * hi {
            return Some(x);
        }
        let newton = x - f / df;
        if df < 0.0 && (newton - x).abs() <= 1e-10 * x {
            // Quadratic convergence leaves an error far below this step.
            return Some(newton);
        }
        x = if df < 0.0 && newton > lo && newton < hi {
            newton
        } else if hi.is_infinite() {
            2.0 * x
        } else if lo == 0.0 {
            0.5 * x
        } else {
            0.5 * (lo + hi)
        };
    }
    None
}

fn split_rates(b: &[f64], snr: &[f64]) -> Vec<f64> {
    b.iter().zip(snr).map(|(&b, &s)| split_rate(b, s)).collect()
}

/// Bandwidth split maximizing the weighted sum rate at `x`.
pub fn bandwidth_allocation(dual: &DualVector, x: f64, scn: &Scenario) -> Result<BandwidthAllocation> {
    check_dual(dual, scn)?;
    let (fractions, eta) = split(dual.weights(), &scn.snrs(x), None)?;
    Ok(BandwidthAllocation { fractions, eta: eta / (scn.horizon * LN_2) })
}

/// Largest weighted sum rate at `x`.
pub fn g1(dual: &DualVector, x: f64, scn: &Scenario) -> Result<f64> {
    check_dual(dual, scn)?;
    let snr = scn.snrs(x);
    let (b, _) = split(dual.weights(), &snr, None)?;
    Ok(dot(dual.weights(), &split_rates(&b, &snr)))
}

fn check_dual(dual: &DualVector, scn: &Scenario) -> Result<()> {
    if dual.weights().len() != scn.num_users() {
        return Err(Error::InvalidInput("dual length differs from the number of users".into()));
    }
    if dual.weights().iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::InvalidInput(format!("dual {:?} has negative entries", dual.weights())));
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dual function value at one multiplier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdmaDualEvaluation {
    pub value: f64,
    pub subgradient: RateTuple,
    pub maximizers: Vec<f64>,
}

/// Time-sharing LP over per-location FDMA rate tuples.
pub fn timeshare_lp_fdma(tuples: &[RateTuple], alpha: &RateProfile) -> Result<(Vec<f64>, f64)> {
    let columns: Vec<Vec<f64>> = tuples.iter().map(|t| t.0.clone()).collect();
    let zero = vec![0.0; alpha.len()];
    let share = timeshare(&columns, &zero, alpha.as_slice())?;
    Ok((share.weights, share.sum_rate))
}

struct Pricing {
    value: f64,
    /// Leg integral of the rates, per user.
    leg: Vec<f64>,
    /// `(point, fractions, hover rates)` for each near-tie maximizer.
    hovers: Vec<(usize, Vec<f64>, Vec<f64>)>,
}

pub(crate) struct FdmaCell<'a> {
    settings: &'a SolverSettings,
    alpha: &'a [f64],
    cell: Cell,
    leg_eta: Vec<Option<f64>>,
    hover_eta: Vec<Option<f64>>,
    /// Multipliers at which columns were priced.
    priced: Vec<Vec<f64>>,
}

/// Column key: (hover point, index into `priced`).
type Column = (usize, usize);

impl<'a> FdmaCell<'a> {
    fn open(
        scn: &Scenario,
        settings: &'a SolverSettings,
        alpha: &'a [f64],
        x_i: f64,
        x_f: f64,
        hovers: HoverSet,
    ) -> Option<Self> {
        let cell = Cell::open(scn, settings, x_i, x_f, hovers)?;
        Some(Self {
            settings,
            alpha,
            leg_eta: vec![None; cell.leg_snr.len()],
            hover_eta: vec![None; cell.hover_points.len()],
            cell,
            priced: Vec::new(),
        })
    }

    fn leg_integral(&mut self, mu: &[f64]) -> Result<Vec<f64>> {
        let mut leg = vec![0.0; mu.len()];
        for (i, snr) in self.cell.leg_snr.iter().enumerate() {
            let (b, eta) = split(mu, snr, self.leg_eta[i])?;
            self.leg_eta[i] = Some(eta);
            let w = self.cell.leg_rule.weights[i];
            for (l, r) in leg.iter_mut().zip(split_rates(&b, snr)) {
                *l += w * r;
            }
        }
        Ok(leg)
    }

    fn evaluate(&mut self, mu: &[f64]) -> Result<Pricing> {
        let leg = self.leg_integral(mu)?;
        let mut splits = Vec::with_capacity(self.cell.hover_points.len());
        let mut values = Vec::with_capacity(self.cell.hover_points.len());
        for (p, snr) in self.cell.hover_snr.iter().enumerate() {
            let (b, eta) = split(mu, snr, self.hover_eta[p])?;
            self.hover_eta[p] = Some(eta);
            let r = split_rates(&b, snr);
            values.push(dot(mu, &r));
            splits.push((b, r));
        }
        let (best, reps) = near_tie_clusters(&values, self.settings.near_tie_tol);
        let value = (dot(mu, &leg) + self.cell.hover_time * best) / self.cell.horizon;
        let hovers = reps
            .into_iter()
            .map(|p| {
                let (b, r) = splits[p].clone();
                (p, b, r)
            })
            .collect();
        Ok(Pricing { value, leg, hovers })
    }

    fn column(&self, leg: &[f64], hover: &[f64]) -> Vec<f64> {
        leg.iter().zip(hover).map(|(l, h)| (l + self.cell.hover_time * h) / self.cell.horizon).collect()
    }

    fn price(&mut self, mu: &[f64]) -> Result<(f64, Vec<(Column, Vec<f64>)>)> {
        let pricing = self.evaluate(mu)?;
        let id = self.priced.len();
        self.priced.push(mu.to_vec());
        let cols = pricing.hovers.iter().map(|(p, _, r)| ((*p, id), self.column(&pricing.leg, r))).collect();
        Ok((pricing.value, cols))
    }

    fn solve(mut self, scn: &Scenario, cutoff: Option<f64>) -> Result<Option<FdmaSolution>> {
        let alpha = self.alpha;
        let settings = self.settings;
        let Some(min) = minimize_dual(alpha, settings, cutoff, |mu| {
            let p = self.evaluate(mu)?;
            let (_, _, r) = &p.hovers[0];
            Ok((p.value, self.column(&p.leg, r)))
        })?
        else {
            return Ok(None);
        };
        let mut pool: ColumnPool<Column> = ColumnPool::new();
        let (value, cols) = self.price(&min.dual)?;
        for (key, col) in cols {
            pool.insert(key, col);
        }
        let mut bound = DualBound { value, dual: min.dual.clone() };
        let zero = vec![0.0; alpha.len()];
        let (share, polish) = column_generation(&mut pool, &zero, alpha, &mut bound, settings, |mu| self.price(mu))?;

        let mut used: Vec<(usize, usize, f64)> = Vec::new();
        for (j, &w) in share.weights.iter().enumerate() {
            if w > 0.0 {
                let (p, id) = pool.keys[j];
                used.push((p, id, w));
            }
        }
        let mut points: Vec<usize> = used.iter().map(|u| u.0).collect();
        points.sort_unstable();
        points.dedup();
        let mut hovers = Vec::with_capacity(used.len());
        let mut flight = Vec::new();
        for &(p, id, w) in &used {
            let mu = &self.priced[id];
            let snr = &self.cell.hover_snr[p];
            let (b, eta) = split(mu, snr, None)?;
            hovers.push(FdmaHover {
                hover_index: points.binary_search(&p).expect("point recorded"),
                x: self.cell.hover_points[p],
                kappa: w,
                rates: RateTuple(split_rates(&b, snr)),
                allocation: BandwidthAllocation { fractions: b, eta: eta / (scn.horizon * LN_2) },
            });
            match flight.iter_mut().find(|c: &&mut FlightAllocation| c.dual.0 == *mu) {
                Some(c) => c.weight += w,
                None => flight.push(FlightAllocation { weight: w, dual: DualVector(mu.clone()) }),
            }
        }
        let hover_points: Vec<f64> = points.iter().map(|&p| self.cell.hover_points[p]).collect();
        let durations: Vec<f64> = (0..points.len())
            .map(|h| self.cell.hover_time * hovers.iter().filter(|e| e.hover_index == h).map(|e| e.kappa).sum::<f64>())
            .collect();
        let shf =
            assemble_shf(self.cell.x_initial, self.cell.x_final, hover_points, durations, scn.v_max, scn.horizon)?;
        let gap = bound.value - share.sum_rate;
        if gap > settings.gap_tol {
            log::warn!("FDMA duality gap {gap:e} exceeds {:e}", settings.gap_tol);
        }
        Ok(Some(FdmaSolution {
            hover_locations: Vec::new(),
            shf,
            hovers,
            flight,
            hover_grid_step: self.cell.hover_step,
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

/// One time-shared hover column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdmaHover {
    pub hover_index: usize,
    pub x: f64,
    /// Share of the hover time.
    pub kappa: f64,
    pub allocation: BandwidthAllocation,
    pub rates: RateTuple,
}

/// Share of the flight during which the bandwidth follows the optimal split
/// for `dual`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlightAllocation {
    pub weight: f64,
    pub dual: DualVector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdmaSolution {
    pub shf: ShfTrajectory,
    /// Clustered near-tie maximizers of the hover objective at `dual`: the
    /// candidate hover set the time-sharing chooses from.
    pub hover_locations: Vec<f64>,
    pub hovers: Vec<FdmaHover>,
    pub flight: Vec<FlightAllocation>,
    /// Hover points closer than 1.5 times this spacing count as one location.
    pub hover_grid_step: f64,
    pub rates: RateTuple,
    pub sum_rate: f64,
    pub dual: DualVector,
    pub dual_value: f64,
    pub diagnostics: SolveDiagnostics,
}

impl FdmaSolution {
    pub fn duality_gap(&self) -> f64 {
        self.dual_value - self.sum_rate
    }

    /// Size of the candidate hover set.
    pub fn hover_count(&self) -> usize {
        self.hover_locations.len()
    }

    /// Distinct hover locations with positive dwell time.
    pub fn dwell_count(&self) -> usize {
        count_hover_clusters(&self.shf, self.hover_grid_step)
    }

    /// Time-shared bandwidth splits in force at time `t`.
    pub fn bandwidth_schedule(&self, t: f64, scn: &Scenario) -> Result<Vec<(f64, Vec<f64>)>> {
        for phase in self.shf.phases() {
            if t < phase.t_start || t > phase.t_end {
                continue;
            }
            return match phase.kind {
                PhaseKind::Hover { index, .. } => {
                    let entries: Vec<&FdmaHover> = self.hovers.iter().filter(|h| h.hover_index == index).collect();
                    let total: f64 = entries.iter().map(|h| h.kappa).sum();
                    Ok(entries.iter().map(|h| (h.kappa / total, h.allocation.fractions.clone())).collect())
                }
                PhaseKind::Flight { x_from, x_to } => {
                    let d = phase.t_end - phase.t_start;
                    let x = if d > 0.0 { x_from + (x_to - x_from) * (t - phase.t_start) / d } else { x_from };
                    let snr = scn.snrs(x);
                    self.flight
                        .iter()
                        .map(|c| Ok((c.weight, split(c.dual.weights(), &snr, None)?.0)))
                        .collect()
                }
            };
        }
        Err(Error::InvalidInput(format!("time {t} outside [0, {}]", self.shf.horizon)))
    }

    /// Average rates recomputed from the trajectory and bandwidth schedule.
    pub fn recompute_rates(&self, scn: &Scenario, panels: usize) -> Result<RateTuple> {
        let k = scn.num_users();
        let mut out = vec![0.0; k];
        for phase in self.shf.phases() {
            let d = phase.t_end - phase.t_start;
            match phase.kind {
                PhaseKind::Flight { x_from, x_to } => {
                    let piece = [LinearPiece { duration: d, x_from, x_to }];
                    for c in &self.flight {
                        for (u, acc) in out.iter_mut().enumerate() {
                            let mut err = None;
                            let v = integrate_pieces(
                                &piece,
                                |x| match split(c.dual.weights(), &scn.snrs(x), None) {
                                    Ok((b, _)) => user_rate_fdma(b[u], x, u, scn),
                                    Err(e) => {
                                        err.get_or_insert(e);
                                        0.0
                                    }
                                },
                                panels,
                            );
                            if let Some(e) = err {
                                return Err(e);
                            }
                            *acc += c.weight * v;
                        }
                    }
                }
                PhaseKind::Hover { index, x } => {
                    let entries: Vec<&FdmaHover> = self.hovers.iter().filter(|h| h.hover_index == index).collect();
                    let total: f64 = entries.iter().map(|h| h.kappa).sum();
                    for h in entries {
                        for (u, acc) in out.iter_mut().enumerate() {
                            *acc += d * h.kappa / total * user_rate_fdma(h.allocation.fractions[u], x, u, scn);
                        }
                    }
                }
            }
        }
        Ok(RateTuple(out.into_iter().map(|v| v / scn.horizon).collect()))
    }
}

/// Dual value, subgradient and hover maximizers for the pair `(x_i, x_f)`.
pub fn evaluate_dual_fdma(
    dual: &DualVector,
    x_i: f64,
    x_f: f64,
    scn: &Scenario,
    settings: &SolverSettings,
) -> Result<FdmaDualEvaluation> {
    check_dual(dual, scn)?;
    let alpha = vec![0.0; scn.num_users()];
    let mut cell = FdmaCell::open(scn, settings, &alpha, x_i, x_f, HoverSet::Grid).ok_or(
        Error::InfeasibleHorizon { flight_time: scn.flight_time(x_i, x_f), horizon: scn.horizon },
    )?;
    let p = cell.evaluate(dual.weights())?;
    let (_, _, r) = &p.hovers[0];
    Ok(FdmaDualEvaluation {
        value: p.value,
        subgradient: RateTuple(cell.column(&p.leg, r)),
        maximizers: p.hovers.iter().map(|(i, _, _)| cell.cell.hover_points[*i]).collect(),
    })
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

pub(crate) fn solve_fixed(
    x_i: f64,
    x_f: f64,
    alpha: &RateProfile,
    scn: &Scenario,
    settings: &SolverSettings,
    hovers: HoverSet,
) -> Result<FdmaSolution> {
    check_inputs(alpha, scn, settings)?;
    let (lo, hi) = scn.span();
    if x_i < lo || x_f > hi || x_i > x_f {
        return Err(Error::InvalidInput(format!("endpoints ({x_i}, {x_f}) outside [{lo}, {hi}] or reversed")));
    }
    let cell = FdmaCell::open(scn, settings, alpha.as_slice(), x_i, x_f, hovers).ok_or(Error::InfeasibleHorizon {
        flight_time: scn.flight_time(x_i, x_f),
        horizon: scn.horizon,
    })?;
    let mut sol = cell.solve(scn, None)?.expect("no cutoff");
    let problem = FdmaProblem { scn, settings, alpha: alpha.as_slice() };
    sol.hover_locations = hover_locations(&problem, sol.dual.weights(), x_i, x_f, scn, settings)?;
    Ok(sol)
}

/// Optimal FDMA trajectory and bandwidth schedule for fixed endpoints.
pub fn solve_p2_fixed_endpoints(
    x_i: f64,
    x_f: f64,
    alpha: &RateProfile,
    scn: &Scenario,
    settings: &SolverSettings,
) -> Result<FdmaSolution> {
    solve_fixed(x_i, x_f, alpha, scn, settings, HoverSet::Grid)
}

struct FdmaProblem<'a> {
    scn: &'a Scenario,
    settings: &'a SolverSettings,
    alpha: &'a [f64],
}

impl<'a> CellProblem for FdmaProblem<'a> {
    type Open = FdmaCell<'a>;
    type Solution = FdmaSolution;

    fn open(&self, x_i: f64, x_f: f64) -> Result<Option<Self::Open>> {
        Ok(FdmaCell::open(self.scn, self.settings, self.alpha, x_i, x_f, HoverSet::Grid))
    }

    fn envelope(&self, dual: &[f64], snrs: &[Vec<f64>]) -> Result<Vec<f64>> {
        let mut warm = None;
        snrs.iter()
            .map(|snr| {
                let (b, eta) = split(dual, snr, warm)?;
                warm = Some(eta);
                Ok(dot(dual, &split_rates(&b, snr)))
            })
            .collect()
    }

    fn solve(&self, cell: Self::Open, cutoff: Option<f64>) -> Result<Option<FdmaSolution>> {
        cell.solve(self.scn, cutoff)
    }

    fn sum_rate(sol: &FdmaSolution) -> f64 {
        sol.sum_rate
    }

    fn dual(sol: &FdmaSolution) -> &[f64] {
        sol.dual.weights()
    }

    fn diagnostics(sol: &mut FdmaSolution) -> &mut SolveDiagnostics {
        &mut sol.diagnostics
    }

    fn endpoints(sol: &FdmaSolution) -> (f64, f64) {
        (sol.shf.x_initial, sol.shf.x_final)
    }

    fn hover_locations(sol: &mut FdmaSolution) -> &mut Vec<f64> {
        &mut sol.hover_locations
    }

    fn widen_resolution(sol: &mut FdmaSolution, step: f64) {
        sol.hover_grid_step = sol.hover_grid_step.max(step);
    }
}

/// Pareto-boundary point of the FDMA capacity region in direction `alpha`.
pub fn solve_p2(alpha: &RateProfile, scn: &Scenario, settings: &SolverSettings) -> Result<FdmaSolution> {
    check_inputs(alpha, scn, settings)?;
    let problem = FdmaProblem { scn, settings, alpha: alpha.as_slice() };
    search_endpoints(&problem, scn, settings, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_solves_stationarity() {
        for c in [1e-6, 1e-3, 0.5, 3.0, 12.0, 30.0] {
            let (p, _) = phi(c);
            let u = 1.0 / p;
            let lhs = u.ln_1p() - u / (1.0 + u);
            assert!((lhs - c).abs() <= 1e-7 * c.max(1.0), "c={c} lhs={lhs}");
        }
    }

    #[test]
    fn phi_derivative_matches_difference() {
        for c in [0.1, 2.0, 9.0] {
            let h = 1e-6 * c;
            let fd = (phi(c + h).0 - phi(c - h).0) / (2.0 * h);
            let (_, d) = phi(c);
            assert!((fd - d).abs() <= 1e-5 * d.abs(), "c={c}");
        }
    }

    #[test]
    fn subnormal_fraction_has_vanishing_rate() {
        let r = split_rate(1e-310, 1e5);
        assert!(r.is_finite() && r >= 0.0 && r < 1e-300);
    }

    #[test]
    fn split_sums_to_one() {
        let (b, _) = split(&[0.7, 1.9, 0.4], &[3e4, 1e5, 2e3], None).unwrap();
        assert!((b.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let (b, _) = split(&[0.0, 1.0], &[3e4, 1e5], None).unwrap();
        assert_eq!(b, vec![0.0, 1.0]);
    }
}
