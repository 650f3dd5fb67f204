//! Acceptance suite. Each criterion prints one `[PASS]` or `[FAIL]` line on
//! stderr, outside the test harness capture, and then asserts.

use std::collections::BTreeMap;
use std::f64::consts::E;
use std::io::Write;
use std::sync::OnceLock;

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use uavmac::experiments::{
    benchmark_static_hover, benchmark_successive_hover, chord_excess, nesting_from_sweeps, oracle_two_user_hfh,
    pareto_sweep, solve, OracleGrid, RegionBoundary, Solution,
};
use uavmac::fdma::bandwidth_allocation;
use uavmac::noma::{subset_sum_rate, vertex_rates, DecodingOrder};
use uavmac::numerics::{lambert_w0, SimpsonRule, BRANCH_POINT};
use uavmac::tdma::solve_p3;
use uavmac::trajectory::{
    decompose, histogram_of_pieces, occupation_histogram, MaxSpeedLeg, Occupation, PiecewiseLinearTrajectory,
    SpeedFreeSchedule,
};
use uavmac::{DualVector, RateProfile, Scenario, Scheme, SolverSettings};

const FOUR_USERS: [f64; 4] = [0.0, 800.0 / 3.0, 1600.0 / 3.0, 800.0];
const HORIZONS: [f64; 4] = [60.0, 80.0, 100.0, 120.0];
const ALTITUDES: [f64; 5] = [50.0, 150.0, 250.0, 400.0, 600.0];

fn report(criterion: u32, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let line = format!("[{tag}] criterion {criterion}: {detail}\n");
    // Written to the raw handle so the line shows without --nocapture.
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
}

fn settings() -> SolverSettings {
    SolverSettings::default()
}

fn two_user(d: f64) -> Scenario {
    Scenario::with_users(vec![0.0, d]).unwrap()
}

fn four_users() -> Scenario {
    Scenario::with_users(FOUR_USERS.to_vec()).unwrap()
}

/// Sweeps over the 21 two-user profiles, keyed by `(D, scheme)`.
fn sweeps() -> &'static BTreeMap<(u32, usize), RegionBoundary> {
    static CELL: OnceLock<BTreeMap<(u32, usize), RegionBoundary>> = OnceLock::new();
    CELL.get_or_init(|| {
        let profiles = RateProfile::two_user_sweep();
        let mut out = BTreeMap::new();
        for d in [100u32, 800] {
            let scn = two_user(d as f64);
            for (i, s) in Scheme::ALL.iter().enumerate() {
                out.insert((d, i), pareto_sweep(*s, &profiles, &scn, &settings()));
            }
        }
        out
    })
}

fn four_user_solutions() -> &'static [Solution; 3] {
    static CELL: OnceLock<[Solution; 3]> = OnceLock::new();
    CELL.get_or_init(|| {
        let scn = four_users();
        Scheme::ALL.map(|s| solve(s, &RateProfile::uniform(4), &scn, &settings()).unwrap())
    })
}

/// Equal-profile solutions on the four-user layout for every horizon, per scheme.
fn horizon_solutions() -> &'static Vec<[Solution; 3]> {
    static CELL: OnceLock<Vec<[Solution; 3]>> = OnceLock::new();
    CELL.get_or_init(|| {
        HORIZONS
            .iter()
            .map(|&t| {
                let scn = four_users().with_horizon(t);
                Scheme::ALL.map(|s| solve(s, &RateProfile::uniform(4), &scn, &settings()).unwrap())
            })
            .collect()
    })
}

/// Equal-profile solutions for K = 2..5 users spaced 200 m apart.
fn user_count_solutions() -> &'static Vec<[Solution; 3]> {
    static CELL: OnceLock<Vec<[Solution; 3]>> = OnceLock::new();
    CELL.get_or_init(|| {
        (2..=5)
            .map(|k| {
                let scn = Scenario::with_users((0..k).map(|i| 200.0 * i as f64).collect()).unwrap();
                Scheme::ALL.map(|s| solve(s, &RateProfile::uniform(k), &scn, &settings()).unwrap())
            })
            .collect()
    })
}

fn altitude_solutions() -> &'static Vec<[Solution; 3]> {
    static CELL: OnceLock<Vec<[Solution; 3]>> = OnceLock::new();
    CELL.get_or_init(|| {
        ALTITUDES
            .iter()
            .map(|&h| {
                let scn = four_users().with_altitude(h);
                Scheme::ALL.map(|s| solve(s, &RateProfile::uniform(4), &scn, &settings()).unwrap())
            })
            .collect()
    })
}

fn common(sol: &Solution) -> f64 {
    sol.sum_rate() / sol.rates().0.len() as f64
}

#[test]
fn criterion_1_oracle_equivalence() {
    let grid = OracleGrid::default();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for d in [100.0, 800.0] {
        let scn = two_user(d);
        for a in [0.5, 0.3] {
            let alpha = RateProfile::two_user(a).unwrap();
            for s in Scheme::ALL {
                let solver = solve(s, &alpha, &scn, &settings()).unwrap().sum_rate();
                let oracle = oracle_two_user_hfh(s, &alpha, &scn, &grid).unwrap().rate;
                let diff = (solver - oracle).abs();
                worst = worst.max(diff);
                if diff > 1e-3 {
                    failures.push(format!("{s} D={d} alpha1={a}: solver {solver} oracle {oracle}"));
                }
            }
        }
    }
    report(1, failures.is_empty(), &format!("12 oracle cases, worst |solver - oracle| = {worst:.2e}"));
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn criterion_2_region_nesting() {
    let sw = sweeps();
    let mut lines = Vec::new();
    let mut pass = true;
    for d in [100u32, 800] {
        let r = nesting_from_sweeps(&sw[&(d, 0)], &sw[&(d, 1)], &sw[&(d, 2)], 1e-6);
        pass &= r.ordered && r.entries.len() == 21;
        let fdma = r.entries.iter().map(|e| e.fdma_margin).fold(f64::INFINITY, f64::min);
        let noma = r.entries.iter().map(|e| e.noma_margin).fold(f64::INFINITY, f64::min);
        lines.push(format!("D={d}: {} profiles, min margins {fdma:.2e} / {noma:.2e}", r.entries.len()));
        for v in r.violations() {
            lines.push(format!("violation at {:?}", v.alpha.as_slice()));
        }
    }
    report(2, pass, &lines.join("; "));
    assert!(pass, "{lines:#?}");
}

#[test]
fn criterion_3_duality_gap() {
    let mut gaps: Vec<(String, f64)> = Vec::new();
    for ((d, s), b) in sweeps() {
        for p in &b.points {
            gaps.push((format!("sweep D={d} scheme {s} {:?}", p.alpha.as_slice()), p.dual_value - p.rate));
        }
    }
    let groups = [
        ("four users", std::slice::from_ref(four_user_solutions())),
        ("horizon", horizon_solutions().as_slice()),
        ("users", user_count_solutions().as_slice()),
        ("altitude", altitude_solutions().as_slice()),
    ];
    for (name, sets) in groups {
        for (i, set) in sets.iter().enumerate() {
            for sol in set {
                gaps.push((format!("{name}[{i}] {}", sol.scheme()), sol.duality_gap()));
            }
        }
    }
    let worst = gaps.iter().map(|g| g.1.abs()).fold(0.0, f64::max);
    let bad: Vec<_> = gaps.iter().filter(|g| g.1.abs() > 1e-3).collect();
    report(3, bad.is_empty(), &format!("{} solves, worst |gap| = {worst:.2e}", gaps.len()));
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn criterion_4_four_user_hover_structure() {
    let sols = four_user_solutions();
    let counts: Vec<usize> = sols.iter().map(|s| s.hover_count()).collect();
    let Solution::Tdma(t) = &sols[2] else { unreachable!() };
    let step = (t.shf.x_final - t.shf.x_initial) / settings().hover_divisions as f64;
    let above_users = t.hover_locations.len() == 4
        && t.hover_locations.iter().zip(FOUR_USERS).all(|(x, w)| (x - w).abs() <= 0.5 * step + 1e-9);
    let pass = counts[0] == 2 && counts[1] == 2 && counts[2] == 4 && above_users;
    let locations: Vec<Vec<f64>> = sols.iter().map(|s| s.trajectory().hover_points.clone()).collect();
    report(
        4,
        pass,
        &format!("hover counts NOMA/FDMA/TDMA = {counts:?} (want [2, 2, 4]), hover points {locations:.1?}"),
    );
    assert!(pass, "hover counts {counts:?}, TDMA locations {:?}", t.hover_locations);
}

#[test]
fn criterion_5_tdma_benchmark_identity() {
    let mut cases = Vec::new();
    for (i, &t) in HORIZONS.iter().enumerate() {
        let scn = four_users().with_horizon(t);
        let bench = benchmark_successive_hover(Scheme::Tdma, &RateProfile::uniform(4), &scn, &settings()).unwrap();
        cases.push((format!("four users T={t}"), horizon_solutions()[i][2].sum_rate(), bench.rate));
    }
    let skewed = RateProfile::normalized(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    for (name, scn, alpha) in [
        ("four users skewed", four_users(), skewed),
        ("D=800 (0.3, 0.7)", two_user(800.0), RateProfile::two_user(0.3).unwrap()),
    ] {
        let bench = benchmark_successive_hover(Scheme::Tdma, &alpha, &scn, &settings()).unwrap();
        cases.push((name.to_string(), solve_p3(&alpha, &scn, &settings()).unwrap().sum_rate, bench.rate));
    }
    let worst = cases.iter().map(|c| (c.1 - c.2).abs()).fold(0.0, f64::max);
    report(5, worst <= 1e-6, &format!("{} cases, worst |solve_p3 - benchmark| = {worst:.2e}", cases.len()));
    assert!(worst <= 1e-6, "{cases:#?}");
}

#[test]
fn criterion_6_monotone_in_horizon() {
    let sols = horizon_solutions();
    let mut pass = true;
    let mut lines = Vec::new();
    for (j, s) in Scheme::ALL.iter().enumerate() {
        let rates: Vec<f64> = sols.iter().map(|set| common(&set[j])).collect();
        pass &= rates.windows(2).all(|w| w[1] >= w[0] - 1e-6);
        let statics: Vec<f64> = HORIZONS
            .iter()
            .map(|&t| {
                benchmark_static_hover(*s, &RateProfile::uniform(4), &four_users().with_horizon(t), &settings()).unwrap().rate
                    / 4.0
            })
            .collect();
        let spread = statics.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            - statics.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        pass &= spread <= 1e-9;
        lines.push(format!("{s} {rates:.4?} static spread {spread:.1e}"));
    }
    report(6, pass, &lines.join("; "));
    assert!(pass, "{lines:#?}");
}

#[test]
fn criterion_7_short_baseline_convexity() {
    let sw = sweeps();
    let mut pass = true;
    let mut lines = Vec::new();
    for (j, s) in [Scheme::Noma, Scheme::Fdma].iter().enumerate() {
        let b = &sw[&(100, j)];
        let excess = chord_excess(b);
        let counts: Vec<usize> = b.points.iter().map(|p| p.hover_count).collect();
        pass &= excess <= 1e-4 && b.points.len() == 21 && counts.iter().all(|&c| c == 1);
        lines.push(format!("{s} chord excess {excess:.2e}, hover counts {:?}", counts.iter().max()));
    }
    report(7, pass, &lines.join("; "));
    assert!(pass, "{lines:#?}");
}

fn random_piecewise(rng: &mut StdRng, v_max: f64) -> PiecewiseLinearTrajectory {
    let n = rng.random_range(1..8);
    let mut t = 0.0;
    let mut x = rng.random_range(-100.0..500.0);
    let mut pts = vec![(t, x)];
    for _ in 0..n {
        let dt = rng.random_range(0.5..20.0);
        let speed = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..=v_max) };
        t += dt;
        x += speed * dt;
        pts.push((t, x));
    }
    PiecewiseLinearTrajectory::new(pts).unwrap()
}

#[test]
fn criterion_8_kernel_identities() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut lines = Vec::new();

    let mut w_err: f64 = 0.0;
    let mut xs = vec![BRANCH_POINT, BRANCH_POINT * (1.0 - 1e-12), -0.3, -1e-5, 0.0, 1e-5, 0.5, E, 1e6];
    xs.extend((0..2000).map(|i| BRANCH_POINT + (1e8 - BRANCH_POINT) * (i as f64 / 1999.0).powi(6)));
    for x in xs {
        let w = lambert_w0(x).unwrap();
        w_err = w_err.max((w * w.exp() - x).abs() / x.abs().max(1.0));
    }
    lines.push(format!("Lambert W {w_err:.1e}"));

    let scn5 = four_users();
    let mut b_err: f64 = 0.0;
    for _ in 0..500 {
        let mu: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
        let dual = DualVector(mu);
        let x = rng.random_range(-200.0..1000.0);
        let alloc = bandwidth_allocation(&dual, x, &scn5).unwrap();
        b_err = b_err.max((alloc.fractions.iter().sum::<f64>() - 1.0).abs());
    }
    lines.push(format!("sum b {b_err:.1e}"));

    let mut tele: f64 = 0.0;
    for _ in 0..100 {
        let k = rng.random_range(2..=5);
        let scn = Scenario::with_users((0..k).map(|i| 200.0 * i as f64).collect()).unwrap();
        let a = rng.random_range(-100.0..400.0);
        let b = a + rng.random_range(0.0..900.0);
        let leg = MaxSpeedLeg::new(a, b, scn.v_max).unwrap();
        let rest = scn.horizon - leg.duration;
        let m = rng.random_range(1..4);
        let mut points: Vec<f64> = (0..m).map(|_| rng.random_range(a..=b)).collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        let raw: Vec<f64> = points.iter().map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let durations: Vec<f64> = raw.iter().map(|r| rest * r / total).collect();
        let hovers = SpeedFreeSchedule::new(points.clone(), durations.clone()).unwrap();
        let mut users: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            users.swap(i, rng.random_range(0..=i));
        }
        let order = DecodingOrder::new(users).unwrap();
        let rates = vertex_rates(&order, &leg, &hovers, &scn, 256).unwrap();
        let all: Vec<usize> = (0..k).collect();
        let rule = SimpsonRule::new(0.0, leg.duration, 256);
        let flight: f64 =
            rule.nodes.iter().zip(&rule.weights).map(|(&t, &w)| w * subset_sum_rate(leg.position(t), &all, &scn)).sum();
        let hover: f64 = points.iter().zip(&durations).map(|(&x, &d)| d * subset_sum_rate(x, &all, &scn)).sum();
        let capacity = (flight + hover) / scn.horizon;
        tele = tele.max((rates.sum() - capacity).abs());
    }
    lines.push(format!("telescoping {tele:.1e}"));

    let bin = 5.0;
    let v_max = 20.0;
    let mut occ: f64 = 0.0;
    for _ in 0..50 {
        let traj = random_piecewise(&mut rng, v_max);
        let (leg, rest) = decompose(&traj, v_max).unwrap();
        let mut pieces = leg.pieces();
        pieces.extend(rest.pieces());
        let lhs = occupation_histogram(&traj, bin);
        let rhs: BTreeMap<i64, f64> =
            histogram_of_pieces(&pieces, bin).into_iter().map(|(x, m)| ((x / bin).round() as i64, m)).collect();
        let mut keys: BTreeMap<i64, f64> = lhs.into_iter().map(|(x, m)| ((x / bin).round() as i64, m)).collect();
        for (k, m) in &rhs {
            *keys.entry(*k).or_insert(0.0) -= m;
        }
        occ = occ.max(keys.values().map(|d| d.abs()).fold(0.0, f64::max));
    }
    let bin_mass = bin / v_max;
    lines.push(format!("occupation {occ:.1e} (bin mass {bin_mass})"));

    let pass = w_err <= 1e-12 && b_err <= 1e-9 && tele <= 1e-9 && occ <= bin_mass;
    report(8, pass, &lines.join(", "));
    assert!(pass, "{lines:?}");
}

#[test]
fn criterion_9_trends() {
    let mut pass = true;
    let mut lines = Vec::new();
    for (j, s) in Scheme::ALL.iter().enumerate() {
        let by_k: Vec<f64> = user_count_solutions().iter().map(|set| common(&set[j])).collect();
        let k_ok = by_k.windows(2).all(|w| w[1] <= w[0] + 1e-6);
        let by_h: Vec<f64> = altitude_solutions().iter().map(|set| common(&set[j])).collect();
        let best = (0..by_h.len()).fold(0, |b, i| if by_h[i] > by_h[b] { i } else { b });
        let h_ok = best > 0 && best + 1 < by_h.len();
        pass &= k_ok && h_ok;
        lines.push(format!("{s} K {by_k:.4?} H {by_h:.4?} argmax H={}", ALTITUDES[best]));
    }
    report(9, pass, &lines.join("; "));
    assert!(pass, "{lines:#?}");
}
