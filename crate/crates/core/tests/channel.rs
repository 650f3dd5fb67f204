use approx::assert_relative_eq;
use proptest::prelude::*;
use uavmac::channel::{channel_gain, elevation_angle, los_probability, ChannelParams, UserLayout};
use uavmac::Scenario;

// Reference values from a direct evaluation of the probabilistic LoS model
// with the simulation defaults.
#[test]
fn frozen_snr_values() {
    let scn = Scenario::with_users(vec![0.0]).unwrap();
    for (x, snr, rate) in [
        (0.0, 160000.0, 17.287721396365278),
        (250.0, 79999.99951471614, 16.287730404373402),
        (800.0, 13003.329911586283, 13.666704441411056),
        (2000.0, 526.7802086939163, 9.04379344162404),
    ] {
        assert_relative_eq!(scn.snr(0, x), snr, max_relative = 1e-12);
        assert_relative_eq!(scn.rate(0, x), rate, max_relative = 1e-12);
    }
    let low = scn.with_altitude(50.0);
    assert_relative_eq!(low.snr(0, 1000.0), 2006.0155815127926, max_relative = 1e-12);
}

#[test]
fn los_probability_at_reference_angles() {
    let p = ChannelParams::default();
    assert_relative_eq!(los_probability(17.35402463626132, &p), 0.8918549078611704, max_relative = 1e-12);
    // Centre of the logistic curve is at elevation C.
    assert_relative_eq!(los_probability(p.c_env, &p), 1.0 / (1.0 + p.c_env), max_relative = 1e-15);
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(UserLayout::new(vec![0.0, 100.0], -250.0).is_err());
    assert!(UserLayout::new(vec![100.0, 0.0], 250.0).is_err());
    assert!(UserLayout::new(vec![], 250.0).is_err());
    let p = ChannelParams { xi: 1.5, ..Default::default() };
    assert!(p.validate().is_err());
    let p = ChannelParams { noise_power: 0.0, ..Default::default() };
    assert!(p.validate().is_err());
}

proptest! {
    #[test]
    fn gain_is_symmetric_and_decreasing(w in -500.0..500.0f64, a in 0.0..3000.0f64, b in 0.0..3000.0f64, h in 10.0..800.0f64) {
        let layout = UserLayout::new(vec![w], h).unwrap();
        let p = ChannelParams::default();
        let left = channel_gain(w - a, w, &layout, &p);
        let right = channel_gain(w + a, w, &layout, &p);
        prop_assert!((left - right).abs() <= 1e-12 * left);
        let (near, far) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(channel_gain(w + near, w, &layout, &p) >= channel_gain(w + far, w, &layout, &p));
    }

    #[test]
    fn elevation_and_probability_in_range(dx in -5000.0..5000.0f64, h in 1.0..1000.0f64) {
        let theta = elevation_angle(dx, 0.0, h);
        prop_assert!(theta > 0.0 && theta <= 90.0);
        let p = los_probability(theta, &ChannelParams::default());
        prop_assert!(p > 0.0 && p <= 1.0);
    }
}
