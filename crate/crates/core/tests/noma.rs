use proptest::prelude::*;
use uavmac::noma::{enumerate_orders, instantaneous_vertex_rates, solve_p1, subset_sum_rate, DecodingOrder};
use uavmac::{RateProfile, Scenario, SolverSettings};

fn scenario(k: usize) -> Scenario {
    Scenario::with_users((0..k).map(|i| 200.0 * i as f64).collect()).unwrap()
}

fn permutation(k: usize, seed: u64) -> DecodingOrder {
    let mut users: Vec<usize> = (0..k).collect();
    let mut s = seed;
    for i in (1..k).rev() {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        users.swap(i, (s >> 33) as usize % (i + 1));
    }
    DecodingOrder::new(users).unwrap()
}

#[test]
fn orders_must_be_permutations() {
    assert!(DecodingOrder::new(vec![0, 0]).is_err());
    assert!(DecodingOrder::new(vec![0, 2]).is_err());
    assert_eq!(DecodingOrder::descending(&[0.2, 0.5, 0.2]).users(), &[1, 0, 2]);
}

#[test]
fn tied_weights_expand_to_several_orders() {
    assert_eq!(enumerate_orders(&[0.3, 0.1, 0.6], 1e-4, true).len(), 1);
    assert_eq!(enumerate_orders(&[0.5, 0.5, 0.1], 1e-4, true).len(), 2);
    assert_eq!(enumerate_orders(&[0.5, 0.5, 0.5], 1e-4, true).len(), 6);
}

#[test]
fn co_located_users_reach_sum_capacity() {
    // Two users at the same spot: hovering above them is optimal and the
    // common rate is capped by the sum capacity there.
    let scn = Scenario::with_users(vec![0.0, 0.0]).unwrap();
    let s = 1.6e5f64;
    let sum_capacity = (2.0 * s).ln_1p() / std::f64::consts::LN_2;
    for a in [0.5, 0.3] {
        let sol = solve_p1(&RateProfile::two_user(a).unwrap(), &scn, &SolverSettings::default()).unwrap();
        assert!((sol.sum_rate - sum_capacity).abs() < 1e-9, "{a}: {}", sol.sum_rate);
    }
}

#[test]
fn solution_self_validates() {
    let scn = scenario(3);
    let alpha = RateProfile::normalized(vec![1.0, 2.0, 1.0]).unwrap();
    let sol = solve_p1(&alpha, &scn, &SolverSettings::default()).unwrap();
    let again = sol.recompute_rates(&scn, 1024);
    assert!((again.profile_rate(&alpha) - sol.sum_rate).abs() < 1e-6);
    assert!(sol.duality_gap().abs() < 1e-3);
    for (r, a) in sol.rates.0.iter().zip(alpha.as_slice()) {
        assert!(*r >= a * sol.sum_rate - 1e-6);
    }
}

proptest! {
    #[test]
    fn vertex_rates_telescope(k in 2usize..6, seed in any::<u64>(), x in -300.0..1200.0f64) {
        let scn = scenario(k);
        let order = permutation(k, seed);
        let r = instantaneous_vertex_rates(&order, x, &scn);
        let all: Vec<usize> = (0..k).collect();
        prop_assert!((r.iter().sum::<f64>() - subset_sum_rate(x, &all, &scn)).abs() <= 1e-9);
    }

    #[test]
    fn vertex_rates_lie_in_the_polymatroid(k in 2usize..6, seed in any::<u64>(), x in -300.0..1200.0f64, mask in 1usize..32) {
        let scn = scenario(k);
        let r = instantaneous_vertex_rates(&permutation(k, seed), x, &scn);
        prop_assert!(r.iter().all(|&v| v >= 0.0));
        let subset: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        prop_assume!(!subset.is_empty());
        let used: f64 = subset.iter().map(|&i| r[i]).sum();
        prop_assert!(used <= subset_sum_rate(x, &subset, &scn) + 1e-9);
    }
}
