use std::fs;
use std::sync::Mutex;

use num_complex::Complex64;

use duality_bench::analytic::wrap_phase;
use duality_bench::scenario::{
    export_outputs, parse_config, run_scenario, Scenario, ScenarioConfig,
};
use duality_bench::Error;

static HEAVY: Mutex<()> = Mutex::new(());

#[test]
fn photon_runs_are_deterministic_and_export_events() {
    let _g = HEAVY.lock().unwrap_or_else(|p| p.into_inner());
    let cfg = ScenarioConfig {
        photons: 20_000,
        seed: 9,
        ..ScenarioConfig::default()
    };
    let (r1, a1) = run_scenario(&cfg, Scenario::PhotonSampling).unwrap();
    let (r2, a2) = run_scenario(&cfg, Scenario::PhotonSampling).unwrap();
    assert_eq!(r1.to_string(), r2.to_string());
    assert_eq!(a1.events, a2.events);
    assert!(r1.passed(), "{r1}");

    assert_eq!(a1.events.len(), 20_000);
    let ids: Vec<u64> = a1.events.iter().map(|e| e.event_id).collect();
    assert_eq!(ids, (0..20_000).collect::<Vec<u64>>());

    let dir = tempfile::tempdir().unwrap();
    let written = export_outputs(&r1, &a1, dir.path()).unwrap();
    assert!(written.iter().any(|p| p.ends_with("events.csv")));
    let csv = fs::read_to_string(dir.path().join("events.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("event_id,plane,x_m,y_m"));
    assert_eq!(lines.count(), 20_000);
    let absorbed = csv.lines().filter(|l| l.contains(",focal,")).count();
    assert!(absorbed > 0 && absorbed < 200, "{absorbed} absorbed events");
}

#[test]
fn fringe_scenarios_follow_a_relative_phase() {
    let _g = HEAVY.lock().unwrap_or_else(|p| p.into_inner());
    let mut cfg = ScenarioConfig::default();
    let phi = 0.9;
    cfg.optics.amplitude_a = Complex64::from_polar(0.8, phi);
    cfg.optics.amplitude_b = Complex64::from_polar(0.6, 0.0);
    for s in [Scenario::FocalFringes, Scenario::PrelensFringes] {
        let (report, _) = run_scenario(&cfg, s).unwrap();
        assert!(report.passed(), "{report}");
        let m = report.fringes.unwrap();
        assert!(
            wrap_phase(m.phase - phi).abs() < 0.05,
            "{s}: phase {}",
            m.phase
        );
        assert!(
            (m.visibility - 0.96).abs() < 0.02,
            "{s}: V {}",
            m.visibility
        );
    }
}

#[test]
fn residual_is_reported_for_every_wave_scenario() {
    let _g = HEAVY.lock().unwrap_or_else(|p| p.into_inner());
    let cfg = ScenarioConfig::default();
    for s in [
        Scenario::FocalFringes,
        Scenario::PrelensFringes,
        Scenario::ImageSpots,
        Scenario::WireGridDouble,
        Scenario::WireGridSingle,
        Scenario::PointScatterer,
    ] {
        let (report, _) = run_scenario(&cfg, s).unwrap();
        assert!(!report.residuals.is_empty(), "{s}");
        assert!(report.residuals.iter().all(|(_, r)| *r < 0.01), "{report}");
        assert!(report.to_string().contains("cross-engine residual"));
    }
}

#[test]
fn image_scenarios_need_the_lens_equation() {
    let mut cfg = parse_config("lens_to_observation = 0.25\n", "test").unwrap();
    for s in Scenario::ALL {
        let result = cfg.validate_for(s);
        assert_eq!(result.is_err(), s.needs_image_plane(), "{s}");
    }
    assert!(matches!(
        run_scenario(&cfg, Scenario::ImageSpots),
        Err(Error::Configuration(_))
    ));
    cfg.optics.lens_to_observation = 0.2;
    assert!(cfg.validate_for(Scenario::ImageSpots).is_ok());
}

#[test]
fn invalid_parameters_are_rejected_before_any_work() {
    for (text, key) in [
        ("wavelength = 0\n", "wavelength"),
        ("wire_fill_factor = 1.5\n", "wire_fill_factor"),
        ("photons = 0\n", "photons"),
        ("duality_ratios = 1, -2\n", "duality_ratios"),
    ] {
        let err = parse_config(text, "test").unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains(key), "{err}");
    }
}
