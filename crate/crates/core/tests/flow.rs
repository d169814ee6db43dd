use std::f64::consts::E;

use quermass_core::flow::{rescale_state, FlowError, run, run_observed, write_trajectory_csv, FlowConfig, FlowMode, FlowState};
use quermass_core::geometry::{make_shape, roundness, Perturbation, RadialGraph, ShapeSpec};

fn wavy(n: usize, eps: f64, mode: u32, intervals: usize) -> RadialGraph {
    let spec = ShapeSpec::PerturbedSphere { radius: 1.0, eps, perturbation: Perturbation::Mode(mode) };
    make_shape(&spec, n, intervals).unwrap()
}

fn final_state(cfg: &FlowConfig, initial: &RadialGraph) -> FlowState {
    let mut last = None;
    run_observed(cfg, initial, |s, _| last = Some(s.clone())).unwrap();
    last.unwrap()
}

#[test]
fn circle_grows_exponentially() {
    let cfg = FlowConfig { intervals: 128, ..FlowConfig::new(1, 1, FlowMode::Raw) };
    let g = make_shape(&ShapeSpec::Sphere { radius: 1.0 }, 1, 128).unwrap();
    let end = final_state(&cfg, &g);
    assert_eq!(end.t, 1.0);
    assert!((end.graph.mean_radius() - E).abs() < 1e-9 * E);
}

#[test]
fn sphere_radius_follows_degree() {
    // R' = R·k/(n−k+1) on spheres.
    for (k, rate) in [(1, 0.5), (2, 2.0)] {
        let cfg = FlowConfig { intervals: 64, t_max: 0.5, ..FlowConfig::new(2, k, FlowMode::Raw) };
        let g = make_shape(&ShapeSpec::Sphere { radius: 0.8 }, 2, 64).unwrap();
        let end = final_state(&cfg, &g);
        let exact = 0.8 * (rate * 0.5f64).exp();
        assert!((end.graph.mean_radius() - exact).abs() < 1e-9 * exact, "k={k}");
        assert!(roundness(&end.graph) < 1e-12);
    }
}

#[test]
fn runs_are_deterministic() {
    let cfg = FlowConfig { intervals: 128, t_max: 0.3, ..FlowConfig::new(2, 1, FlowMode::Normalized) };
    let g = wavy(2, 0.05, 3, 128);
    let csv = |_| {
        let mut out = Vec::new();
        write_trajectory_csv(&run(&cfg, &g).unwrap(), &mut out).unwrap();
        out
    };
    assert_eq!(csv(0), csv(1));
}

#[test]
fn normalized_matches_rescaled_raw() {
    let g = wavy(2, 0.1, 2, 64);
    let normalized = final_state(&FlowConfig { intervals: 64, t_max: 0.5, ..FlowConfig::new(2, 1, FlowMode::Normalized) }, &g);
    let raw = final_state(&FlowConfig { intervals: 64, t_max: 0.5, ..FlowConfig::new(2, 1, FlowMode::Raw) }, &g);
    let rescaled = rescale_state(&raw);
    let diff = normalized.graph.samples().iter().zip(rescaled.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-8, "{diff:e}");
}

#[test]
fn ratios_do_not_depend_on_reporting_scale() {
    let g = wavy(1, 0.03, 3, 128);
    let raw = run(&FlowConfig { intervals: 128, t_max: 1.0, ..FlowConfig::new(1, 1, FlowMode::Raw) }, &g).unwrap();
    let rescaled =
        run(&FlowConfig { intervals: 128, t_max: 1.0, ..FlowConfig::new(1, 1, FlowMode::RescaledRaw) }, &g).unwrap();
    assert_eq!(raw.rows.len(), rescaled.rows.len());
    for (a, b) in raw.rows.iter().zip(&rescaled.rows) {
        assert!((a.ratios[0] - b.ratios[0]).abs() < 1e-12);
    }
    // The rescaled volume stays at its initial value.
    let v = rescaled.quermass_series(2).unwrap();
    assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-9 * v[0]));
}

#[test]
fn axisymmetric_perturbation_rounds_off() {
    let cfg = FlowConfig { intervals: 128, t_max: 3.0, sample_every: 20, ..FlowConfig::new(2, 1, FlowMode::RescaledRaw) };
    let record = run(&cfg, &wavy(2, 0.05, 3, 128)).unwrap();
    let round: Vec<f64> = record.rows.iter().map(|r| r.roundness_rescaled).collect();
    assert!(round.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
    assert!(*round.last().unwrap() < 0.2 * round[0], "{:?}", round.last());
}

#[test]
fn rounding_threshold_stops_early() {
    let cfg = FlowConfig { intervals: 64, t_max: 50.0, tol_round: 1e-4, ..FlowConfig::new(1, 1, FlowMode::RescaledRaw) };
    let record = run(&cfg, &wavy(1, 0.05, 2, 64)).unwrap();
    let last = record.last().unwrap();
    assert!(last.t < 50.0);
    assert!(last.roundness_rescaled < 1e-4);
}

#[test]
fn unresolved_grid_fails_fast_on_drift() {
    let cfg = FlowConfig { intervals: 64, t_max: 0.3, ..FlowConfig::new(2, 1, FlowMode::Normalized) };
    let err = run(&cfg, &wavy(2, 0.05, 3, 64)).unwrap_err();
    match err.error {
        FlowError::DtUnderflow { t, reason, .. } => {
            assert_eq!(t, 0.0);
            assert!(reason.contains("refine the grid"), "{reason}");
        }
        other => panic!("unexpected {other}"),
    }
}
