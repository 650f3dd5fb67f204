use proptest::prelude::*;
use uavmac::tdma::{best_user, hover_duration_lp, solve_p3, switching_points};
use uavmac::{DualVector, RateProfile, Scenario, SolverSettings};

fn scenario(k: usize) -> Scenario {
    Scenario::with_users((0..k).map(|i| 200.0 * i as f64).collect()).unwrap()
}

#[test]
fn equal_weights_switch_at_the_midpoint() {
    let scn = scenario(2);
    let sw = switching_points(&DualVector(vec![1.0, 1.0]), &scn);
    assert_eq!(sw.len(), 1);
    assert_eq!(sw[0].0, 0);
    assert!((sw[0].1 - 100.0).abs() < 0.5);
    assert_eq!(best_user(&DualVector(vec![1.0, 1.0]), 20.0, &scn), 0);
    assert_eq!(best_user(&DualVector(vec![1.0, 1.0]), 180.0, &scn), 1);
}

#[test]
fn pure_hover_duration_lp() {
    // No flight: durations solve tau_1 c / T = a R, tau_2 c / T = (1 - a) R.
    let scn = Scenario::with_users(vec![0.0, 0.0]).unwrap();
    let c = scn.rate(0, 0.0);
    let alpha = RateProfile::two_user(0.3).unwrap();
    let (tau, _, r) = hover_duration_lp(&[0.0, 0.0], &alpha, &[0, 1], 100.0, &scn).unwrap();
    assert!((r - c).abs() < 1e-9);
    assert!((tau[0] - 30.0).abs() < 1e-9 && (tau[1] - 70.0).abs() < 1e-9);
}

#[test]
fn four_users_hover_above_each_user() {
    let scn = Scenario::with_users(vec![0.0, 800.0 / 3.0, 1600.0 / 3.0, 800.0]).unwrap();
    let sol = solve_p3(&RateProfile::uniform(4), &scn, &SolverSettings::default()).unwrap();
    assert_eq!(sol.hover_count(), 4);
    for (x, w) in sol.hover_locations.iter().zip(&scn.layout.positions) {
        assert!((x - w).abs() < 1.0);
    }
    let again = sol.recompute_rates(&scn, 1024);
    assert!((again.profile_rate(&RateProfile::uniform(4)) - sol.sum_rate).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn timeline_shares_sum_to_one(a in 0.05..0.95f64, d in 50.0..900.0f64, t in 0.0..1.0f64) {
        let scn = Scenario::with_users(vec![0.0, d]).unwrap();
        let alpha = RateProfile::two_user(a).unwrap();
        let sol = solve_p3(&alpha, &scn, &SolverSettings::default()).unwrap();
        let shares = sol.shares_at(t * scn.horizon);
        prop_assert!((shares.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        let again = sol.recompute_rates(&scn, 1024);
        prop_assert!((again.profile_rate(&alpha) - sol.sum_rate).abs() <= 1e-6);
    }
}
