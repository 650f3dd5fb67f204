use std::f64::consts::LN_2;

use uavmac::experiments::{
    benchmark_static_hover, benchmark_successive_hover, chord_excess, common_rate, oracle_two_user_hfh, pareto_sweep,
    solve, static_rate, BoundaryPoint, OracleGrid, RegionBoundary,
};
use uavmac::{RateProfile, RateTuple, Scenario, Scheme, SolverSettings};

fn log2p(v: f64) -> f64 {
    v.ln_1p() / LN_2
}

#[test]
fn static_rate_closed_forms() {
    let snr = [400.0, 100.0];
    let a = [0.25, 0.75];
    // TDMA: time shares t_k with t_k log2(1 + s_k) = a_k R.
    let tdma = 1.0 / (a[0] / log2p(snr[0]) + a[1] / log2p(snr[1]));
    assert!((static_rate(Scheme::Tdma, &a, &snr) - tdma).abs() < 1e-12);
    // NOMA: the tightest of the three polymatroid constraints.
    let noma = (log2p(snr[0]) / a[0]).min(log2p(snr[1]) / a[1]).min(log2p(500.0));
    assert!((static_rate(Scheme::Noma, &a, &snr) - noma).abs() < 1e-12);
    // FDMA: check the bandwidths needed at the reported rate fill the band.
    let r = static_rate(Scheme::Fdma, &a, &snr);
    let need = |rate: f64, s: f64| {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let b = 0.5 * (lo + hi);
            if b * log2p(s / b) >= rate {
                hi = b;
            } else {
                lo = b;
            }
        }
        hi
    };
    assert!((need(a[0] * r, snr[0]) + need(a[1] * r, snr[1]) - 1.0).abs() < 1e-9);
    assert!(r <= noma + 1e-12 && r >= tdma - 1e-12);
}

#[test]
fn static_hover_ignores_the_horizon() {
    let scn = Scenario::with_users(vec![0.0, 300.0, 800.0]).unwrap();
    let alpha = RateProfile::uniform(3);
    let s = SolverSettings::default();
    for scheme in Scheme::ALL {
        let a = benchmark_static_hover(scheme, &alpha, &scn, &s).unwrap();
        let b = benchmark_static_hover(scheme, &alpha, &scn.with_horizon(500.0), &s).unwrap();
        assert_eq!(a, b);
        assert!(a.x >= 0.0 && a.x <= 800.0);
    }
}

#[test]
fn optimum_beats_both_benchmarks() {
    let scn = Scenario::with_users(vec![0.0, 500.0]).unwrap();
    let s = SolverSettings::default();
    for a in [0.5, 0.2] {
        let alpha = RateProfile::two_user(a).unwrap();
        for scheme in Scheme::ALL {
            let opt = solve(scheme, &alpha, &scn, &s).unwrap().sum_rate();
            let succ = benchmark_successive_hover(scheme, &alpha, &scn, &s).unwrap().rate;
            let stat = benchmark_static_hover(scheme, &alpha, &scn, &s).unwrap().rate;
            assert!(opt >= succ - 1e-6 && opt >= stat - 1e-6, "{scheme} {a}: {opt} {succ} {stat}");
        }
    }
}

#[test]
fn successive_hover_needs_enough_time() {
    let scn = Scenario::with_users(vec![0.0, 800.0]).unwrap().with_horizon(30.0);
    let s = SolverSettings::default();
    assert!(benchmark_successive_hover(Scheme::Tdma, &RateProfile::uniform(2), &scn, &s).is_err());
}

#[test]
fn solves_are_deterministic() {
    let scn = Scenario::with_users(vec![0.0, 250.0, 600.0]).unwrap();
    let s = SolverSettings::default();
    for scheme in Scheme::ALL {
        let a = solve(scheme, &RateProfile::uniform(3), &scn, &s).unwrap();
        let b = solve(scheme, &RateProfile::uniform(3), &scn, &s).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn common_rate_is_an_equal_share() {
    let scn = Scenario::with_users(vec![0.0, 400.0]).unwrap();
    let s = SolverSettings::default();
    let sol = solve(Scheme::Noma, &RateProfile::uniform(2), &scn, &s).unwrap();
    assert_eq!(common_rate(Scheme::Noma, &scn, &s).unwrap(), sol.sum_rate() / 2.0);
}

#[test]
fn oracle_input_checks() {
    let two = Scenario::with_users(vec![0.0, 100.0]).unwrap();
    let three = Scenario::with_users(vec![0.0, 100.0, 200.0]).unwrap();
    let grid = OracleGrid::default();
    assert!(oracle_two_user_hfh(Scheme::Noma, &RateProfile::uniform(3), &three, &grid).is_err());
    assert!(oracle_two_user_hfh(Scheme::Noma, &RateProfile::two_user(0.0).unwrap(), &two, &grid).is_err());
    let bad = OracleGrid { subdivisions: 6, ..grid };
    assert!(oracle_two_user_hfh(Scheme::Noma, &RateProfile::uniform(2), &two, &bad).is_err());
}

#[test]
fn coarse_oracle_agrees_with_co_located_closed_form() {
    let scn = Scenario::with_users(vec![0.0, 0.0]).unwrap();
    let grid = OracleGrid { endpoint_points: 2, subdivisions: 4, time_points: 5, theta_points: 51, refine: false };
    let r = oracle_two_user_hfh(Scheme::Tdma, &RateProfile::two_user(0.3).unwrap(), &scn, &grid).unwrap();
    assert!((r.rate - scn.rate(0, 0.0)).abs() < 1e-9);
}

fn point(a: f64, r: [f64; 2]) -> BoundaryPoint {
    let alpha = RateProfile::two_user(a).unwrap();
    let rate = if a > 0.0 { r[0] / a } else { r[1] };
    BoundaryPoint { alpha, rates: RateTuple(r.to_vec()), rate, dual_value: rate, hover_count: 1 }
}

#[test]
fn chord_excess_sign() {
    // Quarter circle: convex region, chords stay inside.
    let circle: Vec<BoundaryPoint> = (0..=10)
        .map(|i| {
            let a = i as f64 / 10.0;
            let r = 1.0 / (a * a + (1.0 - a) * (1.0 - a)).sqrt();
            point(a, [a * r, (1.0 - a) * r])
        })
        .collect();
    let convex = RegionBoundary { label: "circle".into(), points: circle, failures: vec![] };
    assert!(chord_excess(&convex) <= 1e-12);
    // A boundary dented at the equal profile.
    let dented = RegionBoundary {
        label: "dent".into(),
        points: vec![point(0.0, [0.0, 1.0]), point(0.5, [0.3, 0.3]), point(1.0, [1.0, 0.0])],
        failures: vec![],
    };
    assert!((chord_excess(&dented) - 0.4).abs() < 1e-12);
}

#[test]
fn sweep_reports_points_in_profile_order() {
    let scn = Scenario::with_users(vec![0.0, 100.0]).unwrap();
    let profiles: Vec<RateProfile> = [0.2, 0.5, 0.8].iter().map(|&a| RateProfile::two_user(a).unwrap()).collect();
    let b = pareto_sweep(Scheme::Tdma, &profiles, &scn, &SolverSettings::default());
    assert!(b.failures.is_empty());
    let got: Vec<&RateProfile> = b.points.iter().map(|p| &p.alpha).collect();
    assert_eq!(got, profiles.iter().collect::<Vec<_>>());
}
