use std::path::Path;

use uavmac::{RateProfile, Scheme, SolverSettings};
use uavmac_cli::{load_config, parse_config, ConfigError};

#[test]
fn two_positions_give_the_default_scenario() {
    let cfg = parse_config("[layout]\npositions = [0, 100]\n").unwrap();
    let scn = &cfg.scenario;
    assert_eq!(scn.layout.positions, vec![0.0, 100.0]);
    assert_eq!(scn.layout.altitude, 250.0);
    assert_eq!((scn.v_max, scn.horizon), (20.0, 100.0));
    let ch = &scn.channel;
    assert!((ch.noise_power - 1e-13).abs() < 1e-25);
    assert!((ch.tx_power - 1.0).abs() < 1e-12);
    assert!((ch.beta0 - 1e-3).abs() < 1e-15);
    assert_eq!((ch.c_env, ch.d_env, ch.xi, ch.epsilon), (10.0, 0.6, 0.2, 2.0));
    assert_eq!(cfg.settings, SolverSettings::default());
    assert_eq!(cfg.profiles, RateProfile::two_user_sweep());
    assert_eq!(cfg.scheme, None);
}

#[test]
fn units_convert_at_load() {
    let cfg = parse_config(
        "[layout]\npositions = [\"0 m\", \"0.5 km\"]\naltitude = \"0.2 km\"\n\
         [channel]\nnoise_power = \"-70 dBm\"\ntx_power = \"100 mW\"\nbeta0 = \"-40 dB\"\n\
         [uav]\nv_max = \"36 km/h\"\nhorizon = \"2 min\"\n[solver]\nscheme = \"tdma\"\n",
    )
    .unwrap();
    let scn = &cfg.scenario;
    assert_eq!(scn.layout.positions, vec![0.0, 500.0]);
    assert!((scn.layout.altitude - 200.0).abs() < 1e-12);
    assert!((scn.channel.noise_power - 1e-10).abs() < 1e-22);
    assert!((scn.channel.tx_power - 0.1).abs() < 1e-15);
    assert!((scn.channel.beta0 - 1e-4).abs() < 1e-16);
    assert!((scn.v_max - 10.0).abs() < 1e-12);
    assert_eq!(scn.horizon, 120.0);
    assert_eq!(cfg.scheme, Some(Scheme::Tdma));
}

#[test]
fn invariant_violations_name_the_field() {
    for (text, field) in [
        ("[layout]\npositions = [0, 100]\naltitude = -250\n", "altitude"),
        ("[layout]\npositions = [0]\n", "positions"),
        ("[layout]\npositions = [0, 100]\n[uav]\nhorizon = \"10 m\"\n", "uav.horizon"),
        ("[layout]\npositions = [0, 100]\n[profiles]\nalpha = [[0.5, 0.6]]\n", "profiles.alpha[0]"),
        ("[layout]\npositions = [0, 100]\n[solver]\ngap_tol = 0\n", "gap_tol"),
        ("[layout]\npositions = [0, 100]\n[oracle]\nsubdivisions = 6\n", "oracle.subdivisions"),
    ] {
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains(field), "{field}: {err}");
    }
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(load_config(Path::new("/nonexistent/scenario.toml")), Err(ConfigError::Io { .. })));
}

#[test]
fn shipped_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["four_users.toml", "two_user_d100.toml", "two_user_d800.toml"] {
        load_config(&dir.join(name)).unwrap();
    }
    let four = load_config(&dir.join("four_users.toml")).unwrap();
    assert_eq!(four.scenario.num_users(), 4);
    assert_eq!(four.profiles.len(), 5);
}
